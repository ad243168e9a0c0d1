#pragma once

#include "hps/app_planner.hpp"
#include "hps/scenario.hpp"

#include <map>
#include <vector>

namespace hps {

struct MrpParams {
  int planned_lead_time = 2;  // days
  int mrp_horizon = 30;       // days
  int mps_horizon = 60;       // days
  std::map<MaterialId, long> safety_stock;

  [[nodiscard]] long safety(MaterialId id) const {
    const auto it = safety_stock.find(id);
    return it == safety_stock.end() ? 0 : it->second;
  }
};

/// Finished products get 10% of the average monthly forecast as safety
/// stock; other non-raw materials get `sub_safety_stock`.
[[nodiscard]] MrpParams default_mrp_params(const ProductionStructure& structure,
                                           DemandPattern pattern, SeasonalPhase phase,
                                           long sub_safety_stock = 0);

/// Whole pieces per working day for one month: the rounded monthly quantity
/// split evenly, remainder one piece per day on the earliest days.
[[nodiscard]] std::vector<long> disaggregate_program(double monthly_quantity,
                                                     int working_days = 20);

/// Daily MPS from cumMPS = max(cumDemand, cumProgram + target). Inputs are
/// per day (demand and program as daily amounts, target as a level). The
/// cumulative schedule is kept non-decreasing.
[[nodiscard]] std::vector<long> compute_mps(const std::vector<long>& daily_demand,
                                            const std::vector<long>& daily_program,
                                            const std::vector<long>& target);

/// Lot-for-lot netting. Projected availability starts at on_hand - safety;
/// each day adds receipts and subtracts gross; a drop below zero becomes the
/// net requirement of that day. `receipts` may be shorter than `gross`.
[[nodiscard]] std::vector<long> net_requirements(const std::vector<long>& gross, long on_hand,
                                                 const std::vector<long>& receipts,
                                                 long safety_stock);

enum class OrderState { Planned, Released, InProcess, Finished };

struct ProductionOrder {
  long id = 0;
  MaterialId material = 0;
  long quantity = 0;
  long start = 0;  // day
  long due = 0;    // day
  OrderState state = OrderState::Planned;
  double completed = -1.0;  // day the last operation finished
};

/// State snapshot for one MRP run. Vectors are indexed by day offset from
/// `today` and cover the MRP horizon. `gross` holds independent demand for
/// finished products and any component needs of already firmed orders.
struct MrpInput {
  long today = 0;
  std::map<MaterialId, std::vector<long>> gross;
  std::map<MaterialId, long> on_hand;
  std::map<MaterialId, std::vector<long>> receipts;
};

struct MrpResult {
  std::vector<ProductionOrder> orders;  // planned, ids left at zero
  std::map<MaterialId, std::vector<long>> gross;  // including dependent demand
  std::map<MaterialId, std::vector<long>> net;
};

/// Netting, lot-for-lot sizing, backward scheduling and BOM explosion level
/// by level from finished products down. Orders start `planned_lead_time`
/// days before their due day; starts before today are moved to today.
[[nodiscard]] MrpResult schedule_and_explode(const ProductionStructure& structure,
                                             const MrpParams& params, const MrpInput& input);

/// Daily view of a binding plan: disaggregated program and planned
/// inventory. Days after the last binding month reuse that month.
class ProgramSchedule {
 public:
  ProgramSchedule() = default;
  ProgramSchedule(const BindingPlan& plan, const Calendar& calendar);

  [[nodiscard]] bool empty() const { return plan_.months() == 0; }
  /// Program pieces of product row `p` on absolute day `day` (0 on weekends).
  [[nodiscard]] long quantity(int p, long day) const;
  /// Planned inventory of product row `p` interpolated linearly between
  /// month-end values, rounded to whole pieces.
  [[nodiscard]] long planned_inventory(int p, double day) const;
  [[nodiscard]] const BindingPlan& plan() const { return plan_; }

 private:
  [[nodiscard]] int month_column(long day) const;

  BindingPlan plan_;
  Calendar calendar_;
  std::vector<std::vector<std::vector<long>>> daily_;  // [p][month][working day]
};

}  // namespace hps
