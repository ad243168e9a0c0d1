#include "hps/mps_mrp.hpp"

#include "hps/demand.hpp"

#include <algorithm>
#include <cmath>

namespace hps {

MrpParams default_mrp_params(const ProductionStructure& structure, DemandPattern pattern,
                             SeasonalPhase phase, long sub_safety_stock) {
  MrpParams params;
  for (const auto& m : structure.materials()) {
    if (m.kind == MaterialKind::Raw) continue;
    if (m.kind == MaterialKind::Finished) {
      double annual = 0.0;
      for (int month = 1; month <= 12; ++month) annual += forecast_value(pattern, m.id, month, phase);
      params.safety_stock[m.id] = std::lround(0.1 * annual / 12.0);
    } else {
      params.safety_stock[m.id] = sub_safety_stock;
    }
  }
  return params;
}

std::vector<long> disaggregate_program(double monthly_quantity, int working_days) {
  std::vector<long> out(static_cast<std::size_t>(std::max(working_days, 0)), 0);
  if (working_days <= 0) return out;
  const long total = std::max(0L, std::lround(monthly_quantity));
  const long base = total / working_days;
  const long rest = total % working_days;
  for (long d = 0; d < working_days; ++d) out[static_cast<std::size_t>(d)] = base + (d < rest ? 1 : 0);
  return out;
}

std::vector<long> compute_mps(const std::vector<long>& daily_demand,
                              const std::vector<long>& daily_program,
                              const std::vector<long>& target) {
  const std::size_t n = std::max({daily_demand.size(), daily_program.size(), target.size()});
  auto at = [](const std::vector<long>& v, std::size_t i) { return i < v.size() ? v[i] : 0L; };
  std::vector<long> out(n, 0);
  long cum_demand = 0;
  long cum_program = 0;
  long previous = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cum_demand += at(daily_demand, i);
    cum_program += at(daily_program, i);
    const long cum = std::max({cum_demand, cum_program + at(target, i), previous});
    out[i] = cum - previous;
    previous = cum;
  }
  return out;
}

std::vector<long> net_requirements(const std::vector<long>& gross, long on_hand,
                                   const std::vector<long>& receipts, long safety_stock) {
  std::vector<long> net(gross.size(), 0);
  long projected = on_hand - safety_stock;
  for (std::size_t d = 0; d < gross.size(); ++d) {
    if (d < receipts.size()) projected += receipts[d];
    projected -= gross[d];
    if (projected < 0) {
      net[d] = -projected;
      projected = 0;
    }
  }
  return net;
}

MrpResult schedule_and_explode(const ProductionStructure& structure, const MrpParams& params,
                               const MrpInput& input) {
  const auto horizon = static_cast<std::size_t>(params.mrp_horizon);
  MrpResult result;
  for (const auto& [id, g] : input.gross) {
    auto& row = result.gross[id];
    row.assign(horizon, 0);
    for (std::size_t d = 0; d < std::min(horizon, g.size()); ++d) row[d] = g[d];
  }
  for (const MaterialId id : structure.planning_order()) {
    auto& gross = result.gross[id];
    gross.resize(horizon, 0);
    const auto oh = input.on_hand.find(id);
    const auto rc = input.receipts.find(id);
    static const std::vector<long> kNone;
    auto net = net_requirements(gross, oh == input.on_hand.end() ? 0 : oh->second,
                                rc == input.receipts.end() ? kNone : rc->second,
                                params.safety(id));
    const auto& material = structure.material(id);
    for (std::size_t d = 0; d < horizon; ++d) {
      if (net[d] <= 0) continue;
      ProductionOrder order;
      order.material = id;
      order.quantity = net[d];
      order.due = input.today + static_cast<long>(d);
      order.start = std::max(input.today, order.due - params.planned_lead_time);
      const auto offset = static_cast<std::size_t>(order.start - input.today);
      for (const auto& line : material.components) {
        if (structure.material(line.component).kind == MaterialKind::Raw) continue;
        auto& child = result.gross[line.component];
        child.resize(horizon, 0);
        child[offset] += order.quantity * line.quantity;
      }
      result.orders.push_back(order);
    }
    result.net[id] = std::move(net);
  }
  return result;
}

ProgramSchedule::ProgramSchedule(const BindingPlan& plan, const Calendar& calendar)
    : plan_(plan), calendar_(calendar) {
  const auto P = plan.production.rows();
  daily_.resize(static_cast<std::size_t>(P));
  for (Eigen::Index p = 0; p < P; ++p) {
    for (int m = 0; m < plan.months(); ++m) {
      daily_[static_cast<std::size_t>(p)].push_back(
          disaggregate_program(plan.production(p, m), calendar.working_days_per_month));
    }
  }
}

int ProgramSchedule::month_column(long day) const {
  const int month = calendar_.month_of(static_cast<double>(day));
  return std::clamp(month - plan_.first_month, 0, plan_.months() - 1);
}

long ProgramSchedule::quantity(int p, long day) const {
  if (empty()) return 0;
  const int wd = calendar_.working_day_index(day);
  if (wd < 0) return 0;
  return daily_[static_cast<std::size_t>(p)][static_cast<std::size_t>(month_column(day))]
               [static_cast<std::size_t>(wd)];
}

long ProgramSchedule::planned_inventory(int p, double day) const {
  if (empty()) return 0;
  const double month_pos = day / calendar_.calendar_days_per_month - plan_.first_month;
  const int last = plan_.months() - 1;
  if (month_pos >= last + 1) return std::lround(plan_.inventory(p, last));
  const int m = std::max(0, static_cast<int>(std::floor(month_pos)));
  const double frac = std::clamp(month_pos - m, 0.0, 1.0);
  const double begin = m == 0 ? plan_.initial_inventory(p) : plan_.inventory(p, m - 1);
  const double end = plan_.inventory(p, m);
  return std::lround(begin + frac * (end - begin));
}

}  // namespace hps
