#pragma once

#include "hps/app_planner.hpp"
#include "hps/cost_ledger.hpp"
#include "hps/demand.hpp"
#include "hps/mps_mrp.hpp"
#include "hps/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <queue>
#include <vector>

namespace hps {

/// Facts available when deciding whether an operation goes to the external
/// server of its machine.
struct OffloadContext {
  double clock = 0.0;            // day
  double due = 0.0;              // planned end date of the order, day
  double remaining_hours = 0.0;  // at this operation
  double budget = 0.0;           // external hours left this month
  bool machine_available = false;
};

class OffloadPolicy {
 public:
  virtual ~OffloadPolicy() = default;
  [[nodiscard]] virtual bool offload(const OffloadContext& c) const = 0;
};

/// Late jobs only: negative slack and enough budget.
class SlackOffload final : public OffloadPolicy {
 public:
  [[nodiscard]] bool offload(const OffloadContext& c) const override;
};

/// Any job that cannot start at once, or is late, while budget remains.
class LoadOffload final : public OffloadPolicy {
 public:
  [[nodiscard]] bool offload(const OffloadContext& c) const override;
};

[[nodiscard]] std::unique_ptr<OffloadPolicy> make_offload_policy(OffloadPolicyKind kind);

/// Slack in days: due - clock - remaining processing time.
[[nodiscard]] double job_slack(double due, double clock, double remaining_hours);

/// Modified earliest due date key: max(due, clock + remaining time), days.
[[nodiscard]] double medd_key(double due, double clock, double remaining_hours);

struct QueuedJob {
  long order = 0;
  double due = 0.0;
  double remaining_hours = 0.0;
  double released = 0.0;
};

/// Index of the job to dispatch next (smallest MEDD key, then earlier
/// release, then lower order id). The queue must not be empty.
[[nodiscard]] std::size_t select_medd(const std::vector<QueuedJob>& queue, double clock);

/// Serves `open` (sorted by due date, then id) front to back with full
/// deliveries only, stopping at the first order the stock cannot cover.
/// Delivered orders get `clock` as delivery time and leave the list.
/// Returns the delivered orders.
std::vector<CustomerOrder> fulfill_in_due_order(std::vector<CustomerOrder>& open, long& stock,
                                                double clock);

/// Production orders waiting for release, decided in due-date order: an
/// order is released when its start day is reached and every non-raw
/// component is in stock. Released orders consume their components.
/// Returns the ids of released orders, in release order.
std::vector<long> release_ready_orders(const ProductionStructure& structure,
                                       std::vector<ProductionOrder>& waiting,
                                       std::map<MaterialId, long>& stock, double clock);

enum class EventType { Completion, ExternalCompletion, ShiftEnd, DayStart, Arrival };

[[nodiscard]] const char* to_string(EventType t);

struct SimEvent {
  double time = 0.0;
  EventType type = EventType::DayStart;
  long seq = 0;
  long a = 0;  // machine index, job id or order id depending on type
  long b = 0;
};

struct SimOptions {
  long app_node_limit = 50;
  /// Check stock signs and material balances after every event; throws
  /// std::logic_error on a violation.
  bool check_invariants = false;
  std::ostream* trace = nullptr;  // CSV: time,event,a,b
  bool journal = false;           // keep ledger accruals
};

class Simulation;

class SimObserver {
 public:
  virtual ~SimObserver() = default;
  virtual void on_plan(const AppModel& model, const AppSolution& solution) {
    (void)model;
    (void)solution;
  }
  virtual void on_event(const SimEvent& event, const Simulation& sim) {
    (void)event;
    (void)sim;
  }
};

/// Material flow tallies of one material since the start of the run.
struct MaterialBalance {
  long initial = 0;
  long produced = 0;
  long consumed = 0;   // by parent order releases
  long delivered = 0;  // to customers
};

/// One replication of the shop: rolling APP, daily MPS/MRP, job release,
/// MEDD dispatching on shift calendars, external overflow, deliveries and
/// cost accrual.
class Simulation {
 public:
  Simulation(const ScenarioConfig& config, std::uint64_t seed, SimOptions options = {},
             SimObserver* observer = nullptr);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Runs to the horizon and returns the report. Call once.
  KpiReport run();

  [[nodiscard]] double clock() const;
  [[nodiscard]] long stock(MaterialId id) const;
  [[nodiscard]] const std::map<MaterialId, MaterialBalance>& balances() const;
  [[nodiscard]] const std::vector<ProductionOrder>& production_orders() const;
  [[nodiscard]] const std::vector<CustomerOrder>& customer_orders() const;
  [[nodiscard]] const CostLedger& ledger() const;
  [[nodiscard]] const ProductionStructure& structure() const;
  /// External hours used per machine over the whole run.
  [[nodiscard]] const std::map<MachineId, double>& external_hours() const;

 private:
  struct State;
  std::unique_ptr<State> s_;
};

}  // namespace hps
