#pragma once

#include "hps/lp.hpp"
#include "hps/scenario.hpp"

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <vector>

namespace hps {

/// Inputs of the aggregate production planning MILP.
///
/// Rows of `forecast`, `hours_per_piece` and `initial_inventory` follow
/// `products`; columns of `hours_per_piece` and of the capacity matrices
/// follow `machines`.
struct AppModel {
  int horizon = 12;
  std::vector<MaterialId> products;
  std::vector<MachineId> machines;
  Eigen::MatrixXd forecast;                       // P x T, pieces per month
  Eigen::MatrixXd hours_per_piece;                // P x J, whole routing per machine
  std::array<Eigen::MatrixXd, kShiftPlans> capacity;  // T x J hours, per shift plan
  Eigen::VectorXd initial_inventory;              // P, negative = shortage to make up
  double eta = 1.0;
  double internal_rate = 100.0;
  double external_rate = 200.0;
  double holding_rate = 28.0;  // per piece per month

  void validate() const;
};

/// Variable layout of the planning MILP. Shift choice is one binary per
/// (month, machine): 1 selects the 15-shift plan, so w_1 = 1 - y and w_2 = y.
struct AppLayout {
  int products = 0;
  int months = 0;
  int machines = 0;

  [[nodiscard]] Eigen::Index production(int p, int t) const { return p * months + t; }
  [[nodiscard]] Eigen::Index inventory(int p, int t) const { return products * months + p * months + t; }
  [[nodiscard]] Eigen::Index external(int t, int j) const { return 2 * products * months + t * machines + j; }
  [[nodiscard]] Eigen::Index shift(int t, int j) const {
    return 2 * products * months + months * machines + t * machines + j;
  }
  [[nodiscard]] Eigen::Index size() const { return 2 * products * months + 2 * months * machines; }
};

struct AppMilp {
  MilpProblem problem;
  AppLayout layout;
  double objective_constant = 0.0;  // sum of 10-shift costs, outside the LP
};

[[nodiscard]] AppMilp build_app_model(const AppModel& model);

struct AppSolution {
  Eigen::MatrixXd production;  // x, P x T
  Eigen::MatrixXd inventory;   // l, P x T
  Eigen::MatrixXd external;    // e, T x J hours
  Eigen::MatrixXi shift_plan;  // T x J, 0 = 10-shift, 1 = 15-shift
  double objective = 0.0;
  SolveStatus status = SolveStatus::Infeasible;
  double gap = 0.0;
  long nodes = 0;

  [[nodiscard]] int w(int t, int j, int s) const { return shift_plan(t, j) == s ? 1 : 0; }
};

/// Solves the full-horizon model. Shift-plan local search seeds the branch
/// and bound and polishes its incumbent when the node limit is hit.
/// `start_plan` (T x J) is an optional extra seed, e.g. a neighbouring plan.
/// Throws SolverError when no plan is found (cannot happen for valid models
/// since external capacity is unbounded).
[[nodiscard]] AppSolution solve_app(const AppModel& model, const SolverOptions& opts = {},
                                    const Eigen::MatrixXi* start_plan = nullptr);

/// Decodes a MILP vector into the plan bundle.
[[nodiscard]] AppSolution decode_app_solution(const AppMilp& milp, const Eigen::VectorXd& values,
                                              double objective);

/// Independent check of the plan equations, evaluated directly from the
/// model data. Each field is the largest violation of that family.
struct AppAudit {
  double shift_choice = 0.0;   // sum_s w = 1
  double capacity = 0.0;       // load <= eta K w + e
  double balance = 0.0;        // l_t = l_{t-1} + x_t - F_t
  double nonnegativity = 0.0;  // x, l, e >= 0
  double binarity = 0.0;       // w in {0, 1}
  double objective = 0.0;      // |recomputed - reported|

  [[nodiscard]] double worst() const;
};

[[nodiscard]] AppAudit audit_app_solution(const AppModel& model, const AppSolution& solution);

/// Total APP objective recomputed from the plan variables.
[[nodiscard]] double app_objective(const AppModel& model, const AppSolution& solution);

/// Hours per piece of each finished product on each machine, summed over
/// the product's whole BOM routing.
[[nodiscard]] Eigen::MatrixXd routing_hours(const ProductionStructure& structure,
                                            const ProcessingTimes& times,
                                            const std::vector<MaterialId>& products,
                                            const std::vector<MachineId>& machines);

/// Forecast matrix for `months` months starting at one-based month `first`.
[[nodiscard]] Eigen::MatrixXd forecast_window(DemandPattern pattern, SeasonalPhase phase,
                                              const std::vector<MaterialId>& products,
                                              int first, int months);

/// Assembles the model for one scenario at a given planning month.
[[nodiscard]] AppModel make_app_model(const ProductionStructure& structure,
                                      const ProcessingTimes& times, const ScenarioConfig& config,
                                      const Calendar& calendar, int first_month,
                                      const Eigen::VectorXd& initial_inventory);

/// The first `months` months of a plan, the part executed on the shop floor.
struct BindingPlan {
  int first_month = 0;  // absolute zero-based month of column 0
  Eigen::MatrixXd production;  // P x months
  Eigen::MatrixXd inventory;   // P x months
  Eigen::VectorXd initial_inventory;
  Eigen::MatrixXd external;    // months x J
  Eigen::MatrixXi shift_plan;  // months x J

  [[nodiscard]] int months() const { return static_cast<int>(production.cols()); }
};

[[nodiscard]] BindingPlan bind_plan(const AppModel& model, const AppSolution& solution,
                                    int absolute_first_month, int months = 4);

/// CSV table: month, kind, id, value rows for x, l, w and e.
void write_plan_csv(std::ostream& out, const AppModel& model, const AppSolution& solution);

}  // namespace hps
