#pragma once

#include "hps/demand.hpp"
#include "hps/scenario.hpp"

#include <map>
#include <vector>

namespace hps {

struct CostBreakdown {
  double internal = 0.0;
  double external = 0.0;
  double holding = 0.0;
  double backorder = 0.0;

  [[nodiscard]] double total() const { return internal + external + holding + backorder; }
  [[nodiscard]] CostBreakdown scaled(double f) const {
    return {internal * f, external * f, holding * f, backorder * f};
  }
};

enum class CostKind { Internal, External, Holding, Backorder };

/// One booked amount, kept when the ledger is asked to journal.
struct Accrual {
  double day = 0.0;
  CostKind kind = CostKind::Internal;
  double amount = 0.0;
};

/// Accrues the four cost shares over the measured window [from, to).
/// Anything before `from` (the warmup) or after `to` is not booked.
class CostLedger {
 public:
  CostLedger(const CostRates& rates, BackorderMode mode, double from, double to,
             bool journal = false);

  /// Internal shift hours provided at `day`, charged regardless of use.
  void add_internal(double day, double hours);
  /// External hours consumed at `day`.
  void add_external(double day, double hours);
  /// Stock of `pieces` held over [begin, end).
  void add_holding(MaterialKind kind, long pieces, double begin, double end);
  /// Order of `amount` pieces due at `due` and delivered at `delivered`
  /// (or still open at the end; pass a value >= the window end).
  void add_backorder(int amount, double due, double delivered);

  [[nodiscard]] const CostBreakdown& costs() const { return costs_; }
  [[nodiscard]] const std::vector<Accrual>& journal() const { return journal_; }
  [[nodiscard]] const CostRates& rates() const { return rates_; }
  [[nodiscard]] double from() const { return from_; }
  [[nodiscard]] double to() const { return to_; }
  [[nodiscard]] double measured_days() const { return to_ - from_; }

 private:
  [[nodiscard]] bool inside(double day) const { return day >= from_ && day < to_; }
  [[nodiscard]] double overlap(double begin, double end) const;
  void book(double day, CostKind kind, double amount);

  CostRates rates_;
  BackorderMode mode_;
  double from_;
  double to_;
  bool keep_journal_;
  CostBreakdown costs_;
  std::vector<Accrual> journal_;
};

struct KpiReport {
  CostBreakdown totals;        // currency over the measured window
  double measured_days = 0.0;
  double service_level = 1.0;  // on-time share of orders due in the window
  long orders = 0;
  long late_orders = 0;
  std::map<MachineId, double> utilization;  // busy / available internal hours

  /// Cost shares per calendar day of the measured window.
  [[nodiscard]] CostBreakdown per_day() const {
    return measured_days > 0 ? totals.scaled(1.0 / measured_days) : CostBreakdown{};
  }
};

struct MachineHours {
  double busy = 0.0;
  double available = 0.0;
};

/// Closes a run: still-open orders are charged up to the window end and
/// counted late. Orders due outside the window are ignored.
[[nodiscard]] KpiReport finalize_run(CostLedger& ledger,
                                     const std::vector<CustomerOrder>& orders,
                                     const std::map<MachineId, MachineHours>& machines);

}  // namespace hps
