#include "hps/cost_ledger.hpp"

#include <algorithm>
#include <stdexcept>

namespace hps {

CostLedger::CostLedger(const CostRates& rates, BackorderMode mode, double from, double to,
                       bool journal)
    : rates_(rates), mode_(mode), from_(from), to_(to), keep_journal_(journal) {
  rates_.validate();
  if (!(to > from)) throw std::invalid_argument("cost ledger window is empty");
}

double CostLedger::overlap(double begin, double end) const {
  return std::max(0.0, std::min(end, to_) - std::max(begin, from_));
}

void CostLedger::book(double day, CostKind kind, double amount) {
  if (amount <= 0.0) return;
  switch (kind) {
    case CostKind::Internal: costs_.internal += amount; break;
    case CostKind::External: costs_.external += amount; break;
    case CostKind::Holding: costs_.holding += amount; break;
    case CostKind::Backorder: costs_.backorder += amount; break;
  }
  if (keep_journal_) journal_.push_back({day, kind, amount});
}

void CostLedger::add_internal(double day, double hours) {
  if (inside(day)) book(day, CostKind::Internal, hours * rates_.internal);
}

void CostLedger::add_external(double day, double hours) {
  if (inside(day)) book(day, CostKind::External, hours * rates_.external);
}

void CostLedger::add_holding(MaterialKind kind, long pieces, double begin, double end) {
  if (pieces <= 0) return;
  const double days = overlap(begin, end);
  book(end, CostKind::Holding, static_cast<double>(pieces) * rates_.holding(kind) * days);
}

void CostLedger::add_backorder(int amount, double due, double delivered) {
  const double days = overlap(due, delivered);
  const double units = mode_ == BackorderMode::PerPiece ? amount : 1.0;
  book(delivered, CostKind::Backorder, units * rates_.backorder * days);
}

KpiReport finalize_run(CostLedger& ledger, const std::vector<CustomerOrder>& orders,
                       const std::map<MachineId, MachineHours>& machines) {
  KpiReport r;
  r.measured_days = ledger.measured_days();
  for (const auto& o : orders) {
    if (o.open()) ledger.add_backorder(o.amount, o.due, ledger.to());
    if (o.due < ledger.from() || o.due >= ledger.to()) continue;
    ++r.orders;
    if (o.open() || o.delivered > o.due) ++r.late_orders;
  }
  r.service_level =
      r.orders == 0 ? 1.0 : static_cast<double>(r.orders - r.late_orders) / static_cast<double>(r.orders);
  for (const auto& [id, h] : machines) {
    r.utilization[id] = h.available > 0 ? h.busy / h.available : 0.0;
  }
  r.totals = ledger.costs();
  return r;
}

}  // namespace hps
