#pragma once

#include "hps/cost_ledger.hpp"
#include "hps/scenario.hpp"
#include "hps/shopfloor.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hps {

/// One simulated run. Costs are per calendar day of the measured window.
struct RunResult {
  std::string scenario_id;
  StructureKind structure = StructureKind::FlowMany;
  DemandPattern pattern = DemandPattern::Constant;
  double rho = 2.5;
  CostLevel capacity_cost = CostLevel::Med;
  CostLevel backorder_cost = CostLevel::Med;
  double alpha = 0.0;
  double eta = 0.0;
  int rep = 0;
  std::uint64_t seed = 0;
  CostBreakdown cost;
  double service_level = 0.0;
  std::array<double, 6> utilization{};  // M1..M6
};

/// Seed of one replication: the base seed hashed with the scenario factors
/// and the replication index. Alpha and eta are left out so every (alpha,
/// eta) cell of a scenario sees the same random numbers.
[[nodiscard]] std::uint64_t cell_seed(const ScenarioConfig& config, int rep);

/// Wires demand generation, rolling planning, the shop floor and the cost
/// ledger for one replication. Errors are rethrown with the cell named.
[[nodiscard]] RunResult run_replication(const ScenarioConfig& config, int rep,
                                        const SimOptions& options = {},
                                        SimObserver* observer = nullptr);

/// The five factors that make up one scenario of the study.
struct ScenarioFactors {
  StructureKind structure = StructureKind::FlowMany;
  DemandPattern pattern = DemandPattern::Constant;
  double rho = 2.5;
  CostLevel capacity_cost = CostLevel::Med;
  CostLevel backorder_cost = CostLevel::Med;

  void apply(ScenarioConfig& config) const;
  [[nodiscard]] static ScenarioFactors of(const ScenarioConfig& config);
};

/// Every combination of the study's factor levels (162 scenarios).
[[nodiscard]] std::vector<ScenarioFactors> full_factor_grid();

struct ExperimentPlan {
  ScenarioConfig base;  // years, warmup, seed and switches
  std::vector<ScenarioFactors> scenarios;
  std::vector<double> alphas;
  std::vector<double> etas;
  int replications = 3;

  /// Throws ConfigError on an empty grid or invalid levels.
  void validate() const;
  [[nodiscard]] std::size_t cells() const {
    return scenarios.size() * alphas.size() * etas.size() * static_cast<std::size_t>(replications);
  }
};

struct SweepOptions {
  int threads = 1;
  SimOptions sim;
  /// Shared by all runs; must be thread safe when threads > 1.
  SimObserver* observer = nullptr;
  /// Called after each finished run (serialized).
  std::function<void(const RunResult&, std::size_t done, std::size_t total)> progress;
};

struct CellFailure {
  std::string scenario_id;
  double alpha = 0.0;
  double eta = 0.0;
  int rep = 0;
  std::string message;
};

struct SweepResult {
  std::vector<RunResult> rows;  // sorted by primary key
  std::vector<CellFailure> failures;
};

[[nodiscard]] SweepResult sweep_grid(const ExperimentPlan& plan, const SweepOptions& options = {});

/// Strict weak order on (scenario factors, alpha, eta, rep).
[[nodiscard]] bool primary_key_less(const RunResult& a, const RunResult& b);

struct OptimalEta {
  double eta = 0.0;
  double cost = 0.0;     // mean total cost per day at eta
  double service = 0.0;  // mean service level at eta
};

/// Argmin over eta of the mean total cost across replications; exact ties go
/// to the lower eta. Rows must share scenario and alpha.
[[nodiscard]] OptimalEta select_optimal_eta(const std::vector<RunResult>& rows);

/// Mean total cost and service per eta, ascending in eta.
struct EtaMean {
  double eta = 0.0;
  double cost = 0.0;
  double service = 0.0;
  int runs = 0;
};
[[nodiscard]] std::vector<EtaMean> mean_by_eta(const std::vector<RunResult>& rows);

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r = 0.0;
  bool r_defined = true;       // false for constant y
  double percent_change = 0.0;  // fitted y from alpha 0 to 0.5, relative to alpha 0
};

/// OLS of y on alpha and the Pearson correlation. Needs at least 3 points
/// and some spread in alpha (std::invalid_argument otherwise).
[[nodiscard]] RegressionResult regress_alpha(const std::vector<std::pair<double, double>>& points);

/// Optimal eta of one (scenario, alpha) cell.
struct CellOptimum {
  ScenarioFactors factors;
  std::string scenario_id;
  double alpha = 0.0;
  OptimalEta best;
};

[[nodiscard]] std::vector<CellOptimum> optimal_cells(const std::vector<RunResult>& rows);

struct ScenarioSummary {
  std::string scenario_id;
  double alpha = 0.0;
  double eta = 0.0;   // mean optimal eta over rho and cost levels
  double cost = 0.0;  // mean optimal cost
  double eta_delta = 0.0;   // percent vs baseline
  double cost_delta = 0.0;  // percent vs baseline
};

struct SensitivityRow {
  std::string scenario_id;
  std::string factor;  // "rho", "capacity_cost" or "backorder_cost"
  std::string level;
  double alpha = 0.0;
  double eta = 0.0;
  double cost = 0.0;
  int cells = 0;
};

struct RegressionRow {
  std::string scenario_id;
  std::string target;  // "eta" or "cost"
  RegressionResult fit;
  int points = 0;
};

struct Report {
  std::string baseline;
  std::vector<ScenarioSummary> summaries;
  std::vector<SensitivityRow> sensitivity;
  std::vector<RegressionRow> regressions;
};

/// Summary tables relative to `baseline` (a scenario id such as "f_m_c").
/// Regressions are fitted on every optimal cell of a scenario id, one point
/// per (factor combination, alpha), when at least 3 alpha levels exist.
/// Throws std::invalid_argument when the baseline is missing.
[[nodiscard]] Report emit_report(const std::vector<RunResult>& rows, const std::string& baseline);

void write_report_text(std::ostream& out, const Report& report);
void write_report_csv(std::ostream& out, const Report& report);

/// Cost and service versus eta, one polyline per alpha.
void write_eta_svg(std::ostream& out, const std::vector<RunResult>& rows, const std::string& title);

void write_results_csv(std::ostream& out, const std::vector<RunResult>& rows);
[[nodiscard]] std::string format_row(const RunResult& row);
/// Parses the CSV written by write_results_csv. Throws ConfigError on a
/// malformed header or row.
[[nodiscard]] std::vector<RunResult> read_results_csv(std::istream& in);

}  // namespace hps
