#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hps {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

/// Dense minimization problem: min c'x s.t. A x (rel) b, lower <= x <= upper.
struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;
  std::vector<Relation> relations;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<std::string> names;  // optional, used by the text dump

  [[nodiscard]] Eigen::Index num_vars() const { return objective.size(); }
  [[nodiscard]] Eigen::Index num_rows() const { return rhs.size(); }

  /// Throws std::invalid_argument on inconsistent dimensions or bounds.
  void validate() const;
};

/// LP plus a set of variables restricted to {0, 1}.
struct MilpProblem {
  LpProblem lp;
  std::vector<Eigen::Index> binaries;

  void validate() const;
};

/// Incremental row/column builder; produces a dense LpProblem.
class LpBuilder {
 public:
  Eigen::Index add_variable(double cost, double lower = 0.0,
                            double upper = kInfinity, std::string name = {});
  void add_row(const std::vector<std::pair<Eigen::Index, double>>& terms,
               Relation rel, double rhs);
  [[nodiscard]] Eigen::Index num_vars() const {
    return static_cast<Eigen::Index>(cost_.size());
  }
  [[nodiscard]] LpProblem build() const;

 private:
  struct Row {
    std::vector<std::pair<Eigen::Index, double>> terms;
    Relation rel;
    double rhs;
  };
  std::vector<double> cost_, lower_, upper_;
  std::vector<std::string> names_;
  std::vector<Row> rows_;
};

struct SolverOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double integrality_tol = 1e-6;
  double relative_gap = 1e-9;
  double absolute_gap = 1e-6;
  long iteration_limit = 200000;
  long node_limit = 1000000;

  void validate() const;
};

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  IterationLimit,
  NodeLimit,
};

[[nodiscard]] const char* to_string(SolveStatus s);

struct LpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  Eigen::VectorXd values;
  double objective = kInfinity;
  long iterations = 0;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  Eigen::VectorXd values;
  double objective = kInfinity;
  double best_bound = -kInfinity;
  double gap = kInfinity;  // absolute incumbent - bound
  long nodes = 0;
  long lp_iterations = 0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bounded-variable primal simplex (phase 1 minimizes the sum of bound
/// infeasibilities). Dantzig pricing, Bland's rule after a run of degenerate
/// pivots.
[[nodiscard]] LpSolution solve_lp(const LpProblem& problem,
                                  const SolverOptions& opts = {});

/// Branch and bound over the binaries: LP bounds, dual-simplex warm starts,
/// depth-first plunge until the first incumbent, best-bound afterwards,
/// most-fractional branching (lowest index on ties).
///
/// Optional hook: called with (parent bound, child bound) for every child
/// LP solved. Used by tests for bound-monotonicity checks.
struct BranchObserver {
  virtual ~BranchObserver() = default;
  virtual void on_child(double parent_objective, double child_objective) = 0;
};

/// `incumbent`, when given, must be a feasible point with integral binaries;
/// it seeds pruning and is returned if nothing better is found.
[[nodiscard]] MilpSolution solve_milp(const MilpProblem& problem,
                                      const SolverOptions& opts = {},
                                      BranchObserver* observer = nullptr,
                                      const Eigen::VectorXd* incumbent = nullptr);

/// Solves the continuous part for given binary values, warm-starting each
/// call from the previous optimal basis (dual simplex).
class FixedBinarySolver {
 public:
  FixedBinarySolver(const MilpProblem& problem, const SolverOptions& opts = {});
  ~FixedBinarySolver();
  FixedBinarySolver(const FixedBinarySolver&) = delete;
  FixedBinarySolver& operator=(const FixedBinarySolver&) = delete;

  /// `assignment` holds one 0/1 value per entry of problem.binaries.
  [[nodiscard]] LpSolution solve(const Eigen::VectorXd& assignment);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Exhaustive oracle: fixes every binary assignment and solves each LP cold.
/// Throws std::invalid_argument for more than 20 binaries.
[[nodiscard]] MilpSolution enumerate_exact(const MilpProblem& problem,
                                           const SolverOptions& opts = {});

/// Maximum row violation of `x` (including bound violations).
[[nodiscard]] double max_violation(const LpProblem& problem,
                                   const Eigen::VectorXd& x);

/// CPLEX-LP style text dump (Minimize / Subject To / Bounds / Binaries / End).
void write_lp_format(std::ostream& out, const MilpProblem& problem);

}  // namespace hps
