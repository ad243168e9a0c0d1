#include "hps/lp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <queue>
#include <sstream>

namespace hps {

void LpProblem::validate() const {
  const auto n = num_vars();
  const auto m = num_rows();
  if (constraints.rows() != m || constraints.cols() != n) {
    throw std::invalid_argument("LpProblem: constraint matrix is " +
                                std::to_string(constraints.rows()) + "x" +
                                std::to_string(constraints.cols()) +
                                ", expected " + std::to_string(m) + "x" +
                                std::to_string(n));
  }
  if (static_cast<Eigen::Index>(relations.size()) != m) {
    throw std::invalid_argument("LpProblem: relation count mismatch");
  }
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("LpProblem: bound vector size mismatch");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(lower(j) <= upper(j)) || lower(j) == kInfinity ||
        upper(j) == -kInfinity) {
      throw std::invalid_argument("LpProblem: invalid bounds on variable " +
                                  std::to_string(j));
    }
  }
  if (!objective.allFinite() || !constraints.allFinite() || !rhs.allFinite()) {
    throw std::invalid_argument("LpProblem: non-finite data");
  }
}

void MilpProblem::validate() const {
  lp.validate();
  for (auto j : binaries) {
    if (j < 0 || j >= lp.num_vars()) {
      throw std::invalid_argument("MilpProblem: binary index out of range");
    }
    if (lp.lower(j) < 0.0 || lp.upper(j) > 1.0) {
      throw std::invalid_argument(
          "MilpProblem: binary variable bounds exceed [0, 1]");
    }
  }
}

void SolverOptions::validate() const {
  if (!(feasibility_tol > 0 && optimality_tol > 0 && integrality_tol > 0 &&
        relative_gap > 0 && absolute_gap > 0)) {
    throw std::invalid_argument("SolverOptions: tolerances must be positive");
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::NodeLimit: return "node_limit";
  }
  return "unknown";
}

Eigen::Index LpBuilder::add_variable(double cost, double lower, double upper,
                                     std::string name) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  names_.push_back(std::move(name));
  return static_cast<Eigen::Index>(cost_.size()) - 1;
}

void LpBuilder::add_row(const std::vector<std::pair<Eigen::Index, double>>& terms,
                        Relation rel, double rhs) {
  rows_.push_back(Row{terms, rel, rhs});
}

LpProblem LpBuilder::build() const {
  const auto n = num_vars();
  const auto m = static_cast<Eigen::Index>(rows_.size());
  LpProblem p;
  p.objective = Eigen::Map<const Eigen::VectorXd>(cost_.data(), n);
  p.lower = Eigen::Map<const Eigen::VectorXd>(lower_.data(), n);
  p.upper = Eigen::Map<const Eigen::VectorXd>(upper_.data(), n);
  p.constraints = Eigen::MatrixXd::Zero(m, n);
  p.rhs.resize(m);
  p.relations.reserve(rows_.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows_[static_cast<std::size_t>(i)];
    for (const auto& [j, a] : row.terms) p.constraints(i, j) += a;
    p.rhs(i) = row.rhs;
    p.relations.push_back(row.rel);
  }
  p.names = names_;
  return p;
}

double max_violation(const LpProblem& problem, const Eigen::VectorXd& x) {
  double worst = 0.0;
  const Eigen::VectorXd ax = problem.constraints * x;
  for (Eigen::Index i = 0; i < problem.num_rows(); ++i) {
    const double r = ax(i) - problem.rhs(i);
    switch (problem.relations[static_cast<std::size_t>(i)]) {
      case Relation::LessEqual: worst = std::max(worst, r); break;
      case Relation::GreaterEqual: worst = std::max(worst, -r); break;
      case Relation::Equal: worst = std::max(worst, std::abs(r)); break;
    }
  }
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    worst = std::max(worst, problem.lower(j) - x(j));
    worst = std::max(worst, x(j) - problem.upper(j));
  }
  return worst;
}

namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

constexpr double kPivotTol = 1e-9;
constexpr int kRefactorEvery = 100;
constexpr int kDegenerateSwitch = 50;

/// Dense bounded-variable simplex tableau.
///
/// Columns 0..n-1 are structural, n..n+m-1 are row slacks with
/// a_i x + s_i = b_i. The last row holds reduced costs, the last column
/// holds B^-1 b.
class Tableau {
 public:
  Tableau(const LpProblem& p, const SolverOptions& opts)
      : problem_(&p), opts_(opts), n_(p.num_vars()), m_(p.num_rows()),
        cols_(n_ + m_) {
    lo_.resize(cols_);
    up_.resize(cols_);
    cost_ = Eigen::VectorXd::Zero(cols_);
    cost_.head(n_) = p.objective;
    lo_.head(n_) = p.lower;
    up_.head(n_) = p.upper;
    for (Eigen::Index i = 0; i < m_; ++i) {
      switch (p.relations[static_cast<std::size_t>(i)]) {
        case Relation::LessEqual: lo_(n_ + i) = 0; up_(n_ + i) = kInfinity; break;
        case Relation::GreaterEqual: lo_(n_ + i) = -kInfinity; up_(n_ + i) = 0; break;
        case Relation::Equal: lo_(n_ + i) = 0; up_(n_ + i) = 0; break;
      }
    }
    x_ = Eigen::VectorXd::Zero(cols_);
    state_.assign(static_cast<std::size_t>(cols_), VarState::AtLower);
    head_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index j = 0; j < n_; ++j) place_nonbasic(j);
    for (Eigen::Index i = 0; i < m_; ++i) {
      head_[static_cast<std::size_t>(i)] = n_ + i;
      state_[static_cast<std::size_t>(n_ + i)] = VarState::Basic;
    }
    tab_.resize(m_ + 1, cols_ + 1);
    tab_.block(0, 0, m_, n_) = p.constraints;
    tab_.block(0, n_, m_, m_).setIdentity();
    tab_.block(0, cols_, m_, 1) = p.rhs;
    tab_.row(m_).head(cols_) = cost_.transpose();
    tab_(m_, cols_) = 0.0;
    compute_basics();
  }

  [[nodiscard]] Eigen::Index num_structural() const { return n_; }
  [[nodiscard]] long iterations() const { return iterations_; }

  /// Moving a nonbasic variable shifts the basic values; pass refresh=false
  /// when batching and call refresh_basics() once afterwards.
  void set_bounds(Eigen::Index j, double lo, double up, bool refresh = true) {
    lo_(j) = lo;
    up_(j) = up;
    if (state(j) != VarState::Basic) {
      place_nonbasic(j);
      if (refresh) compute_basics();
    }
  }

  void refresh_basics() { compute_basics(); }

  [[nodiscard]] double objective() const {
    return cost_.head(n_).dot(x_.head(n_));
  }
  [[nodiscard]] Eigen::VectorXd structural() const { return x_.head(n_); }
  [[nodiscard]] const Eigen::VectorXd& lower() const { return lo_; }
  [[nodiscard]] const Eigen::VectorXd& upper() const { return up_; }

  /// Primal simplex from the current basis (phase 1 when needed).
  SolveStatus primal() {
    int degenerate = 0;
    while (true) {
      if (iterations_ >= opts_.iteration_limit) return SolveStatus::IterationLimit;
      maybe_refactor();
      const bool infeasible = any_infeasible();
      Eigen::RowVectorXd d;
      if (infeasible) {
        Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(m_);
        for (Eigen::Index i = 0; i < m_; ++i) {
          const auto b = head_[static_cast<std::size_t>(i)];
          if (x_(b) < lo_(b) - opts_.feasibility_tol) g(i) = -1.0;
          else if (x_(b) > up_(b) + opts_.feasibility_tol) g(i) = 1.0;
        }
        d = -(g * tab_.block(0, 0, m_, cols_));
      } else {
        d = tab_.row(m_).head(cols_);
      }
      const bool bland = degenerate >= kDegenerateSwitch;
      Eigen::Index q = -1;
      double dir = 0.0;
      double best = 0.0;
      const double dtol = infeasible ? 1e-9 : opts_.optimality_tol * scale_;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        const auto s = state(j);
        if (s == VarState::Basic || lo_(j) == up_(j)) continue;
        double cand_dir = 0.0;
        if ((s == VarState::AtLower || s == VarState::FreeZero) && d(j) < -dtol) cand_dir = 1.0;
        else if ((s == VarState::AtUpper || s == VarState::FreeZero) && d(j) > dtol) cand_dir = -1.0;
        if (cand_dir == 0.0) continue;
        if (bland) { q = j; dir = cand_dir; break; }
        if (std::abs(d(j)) > best) { best = std::abs(d(j)); q = j; dir = cand_dir; }
      }
      if (q < 0) {
        return infeasible ? SolveStatus::Infeasible : SolveStatus::Optimal;
      }
      // Ratio test along direction dir for x_q.
      double step = up_(q) - lo_(q);
      Eigen::Index leave_row = -1;
      bool leave_to_upper = false;
      double leave_pivot = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = tab_(i, q);
        if (std::abs(a) < kPivotTol) continue;
        const double rate = -a * dir;
        const auto b = head_[static_cast<std::size_t>(i)];
        const double v = x_(b);
        double t = kInfinity;
        bool to_upper = false;
        const bool below = v < lo_(b) - opts_.feasibility_tol;
        const bool above = v > up_(b) + opts_.feasibility_tol;
        if (rate > 0) {
          if (below) { t = (lo_(b) - v) / rate; to_upper = false; }
          else if (!above && up_(b) < kInfinity) { t = (up_(b) - v) / rate; to_upper = true; }
        } else {
          if (above) { t = (v - up_(b)) / -rate; to_upper = true; }
          else if (!below && lo_(b) > -kInfinity) { t = (v - lo_(b)) / -rate; to_upper = false; }
        }
        if (t == kInfinity) continue;
        t = std::max(t, 0.0);
        const bool better =
            t < step - 1e-12 ||
            (leave_row >= 0 && t <= step + 1e-12 &&
             (bland ? b < head_[static_cast<std::size_t>(leave_row)]
                    : std::abs(a) > std::abs(leave_pivot)));
        if (better || (leave_row < 0 && t < step)) {
          step = t;
          leave_row = i;
          leave_to_upper = to_upper;
          leave_pivot = a;
        }
      }
      if (step == kInfinity) return SolveStatus::Unbounded;
      ++iterations_;
      degenerate = step <= 1e-12 ? degenerate + 1 : 0;
      if (leave_row < 0) {
        // Bound flip of the entering variable.
        if (dir > 0) { x_(q) = up_(q); state(q) = VarState::AtUpper; }
        else { x_(q) = lo_(q); state(q) = VarState::AtLower; }
        compute_basics();
        continue;
      }
      const auto leaving = head_[static_cast<std::size_t>(leave_row)];
      pivot(leave_row, q);
      state(leaving) = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
      x_(leaving) = leave_to_upper ? up_(leaving) : lo_(leaving);
      compute_basics();
    }
  }

  /// Dual simplex; requires a dual feasible basis. Falls back to primal
  /// clean-up if dual feasibility drifted.
  SolveStatus dual() {
    while (true) {
      if (iterations_ >= opts_.iteration_limit) return SolveStatus::IterationLimit;
      maybe_refactor();
      Eigen::Index r = -1;
      double worst = opts_.feasibility_tol;
      bool below = false;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const auto b = head_[static_cast<std::size_t>(i)];
        const double lo_gap = lo_(b) - x_(b);
        const double up_gap = x_(b) - up_(b);
        if (lo_gap > worst) { worst = lo_gap; r = i; below = true; }
        if (up_gap > worst) { worst = up_gap; r = i; below = false; }
      }
      if (r < 0) break;
      Eigen::Index q = -1;
      double best_ratio = kInfinity;
      double best_alpha = 0.0;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        const auto s = state(j);
        if (s == VarState::Basic || lo_(j) == up_(j)) continue;
        const double a = tab_(r, j);
        if (std::abs(a) < kPivotTol) continue;
        bool ok = false;
        if (s == VarState::FreeZero) ok = true;
        else if (below) ok = (s == VarState::AtLower && a < 0) || (s == VarState::AtUpper && a > 0);
        else ok = (s == VarState::AtLower && a > 0) || (s == VarState::AtUpper && a < 0);
        if (!ok) continue;
        const double ratio = std::abs(tab_(m_, j)) / std::abs(a);
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && std::abs(a) > std::abs(best_alpha))) {
          best_ratio = ratio;
          best_alpha = a;
          q = j;
        }
      }
      if (q < 0) return SolveStatus::Infeasible;
      ++iterations_;
      const auto leaving = head_[static_cast<std::size_t>(r)];
      pivot(r, q);
      state(leaving) = below ? VarState::AtLower : VarState::AtUpper;
      x_(leaving) = below ? lo_(leaving) : up_(leaving);
      compute_basics();
    }
    return primal();
  }

  struct Basis {
    std::vector<Eigen::Index> head;
    std::vector<VarState> state;
    Eigen::VectorXd lo, up, x;
  };

  [[nodiscard]] Basis basis() const { return Basis{head_, state_, lo_, up_, x_}; }

  void load(const Basis& b) {
    head_ = b.head;
    state_ = b.state;
    lo_ = b.lo;
    up_ = b.up;
    x_ = b.x;
    refactor();
  }

  /// Rebuilds B^-1 [A I | b] and reduced costs from the basis head.
  void refactor() {
    const auto& p = *problem_;
    Eigen::MatrixXd basis(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto b = head_[static_cast<std::size_t>(i)];
      if (b < n_) basis.col(i) = p.constraints.col(b);
      else basis.col(i) = Eigen::VectorXd::Unit(m_, b - n_);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
    Eigen::MatrixXd full(m_, cols_ + 1);
    full.block(0, 0, m_, n_) = p.constraints;
    full.block(0, n_, m_, m_).setIdentity();
    full.col(cols_) = p.rhs;
    tab_.topRows(m_) = lu.solve(full);
    Eigen::RowVectorXd cb(m_);
    for (Eigen::Index i = 0; i < m_; ++i) cb(i) = cost_(head_[static_cast<std::size_t>(i)]);
    tab_.row(m_).head(cols_) = cost_.transpose() - cb * tab_.block(0, 0, m_, cols_);
    for (Eigen::Index i = 0; i < m_; ++i) tab_(i, head_[static_cast<std::size_t>(i)]) = 1.0;
    since_refactor_ = 0;
    compute_basics();
  }

 private:
  VarState& state(Eigen::Index j) { return state_[static_cast<std::size_t>(j)]; }
  [[nodiscard]] VarState state(Eigen::Index j) const { return state_[static_cast<std::size_t>(j)]; }

  void place_nonbasic(Eigen::Index j) {
    if (lo_(j) > -kInfinity) { x_(j) = lo_(j); state(j) = VarState::AtLower; }
    else if (up_(j) < kInfinity) { x_(j) = up_(j); state(j) = VarState::AtUpper; }
    else { x_(j) = 0.0; state(j) = VarState::FreeZero; }
  }

  void compute_basics() {
    Eigen::VectorXd xn = x_;
    for (auto b : head_) xn(b) = 0.0;
    const Eigen::VectorXd xb =
        tab_.block(0, cols_, m_, 1) - tab_.block(0, 0, m_, cols_) * xn;
    for (Eigen::Index i = 0; i < m_; ++i) x_(head_[static_cast<std::size_t>(i)]) = xb(i);
  }

  [[nodiscard]] bool any_infeasible() const {
    for (auto b : head_) {
      if (x_(b) < lo_(b) - opts_.feasibility_tol || x_(b) > up_(b) + opts_.feasibility_tol) return true;
    }
    return false;
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    tab_.row(r) /= tab_(r, q);
    Eigen::VectorXd col = tab_.col(q);
    col(r) = 0.0;
    tab_.noalias() -= col * tab_.row(r);
    tab_.col(q).setZero();
    tab_(r, q) = 1.0;
    const auto leaving = head_[static_cast<std::size_t>(r)];
    head_[static_cast<std::size_t>(r)] = q;
    state(q) = VarState::Basic;
    (void)leaving;
    ++since_refactor_;
  }

  void maybe_refactor() {
    if (since_refactor_ >= kRefactorEvery) refactor();
  }

  const LpProblem* problem_;
  SolverOptions opts_;
  Eigen::Index n_, m_, cols_;
  Eigen::MatrixXd tab_;
  Eigen::VectorXd cost_, lo_, up_, x_;
  std::vector<VarState> state_;
  std::vector<Eigen::Index> head_;
  long iterations_ = 0;
  int since_refactor_ = 0;
  double scale_ = 1.0;
};

LpSolution finish(const Tableau& t, SolveStatus status) {
  LpSolution s;
  s.status = status;
  s.iterations = t.iterations();
  if (status == SolveStatus::Optimal) {
    s.values = t.structural();
    s.objective = t.objective();
  }
  return s;
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const SolverOptions& opts) {
  problem.validate();
  opts.validate();
  Tableau t(problem, opts);
  const auto status = t.primal();
  return finish(t, status);
}

namespace {

// Open nodes keep the parent's optimal tableau while few are stored;
// beyond that only the basis is kept and the tableau is refactored.
constexpr long kMaxSnapshots = 96;

struct Node {
  double bound;
  long sequence;
  std::shared_ptr<const Tableau> snapshot;
  std::shared_ptr<const Tableau::Basis> basis;
  Eigen::Index var;
  double value;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.sequence > b.sequence;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpProblem& p, const SolverOptions& o, BranchObserver* obs,
                 const Eigen::VectorXd* start)
      : problem_(p), opts_(o), observer_(obs) {
    if (start != nullptr) {
      has_incumbent_ = true;
      incumbent_ = *start;
      incumbent_obj_ = p.lp.objective.dot(*start);
    }
  }

  MilpSolution run() {
    MilpSolution out;
    Tableau root(problem_.lp, opts_);
    auto status = root.primal();
    lp_iterations_ += root.iterations();
    if (status == SolveStatus::Unbounded || status == SolveStatus::IterationLimit) {
      out.status = status;
      out.lp_iterations = lp_iterations_;
      return out;
    }
    if (status == SolveStatus::Infeasible) {
      out.status = SolveStatus::Infeasible;
      out.nodes = 1;
      out.lp_iterations = lp_iterations_;
      return out;
    }
    nodes_ = 1;
    dive(std::move(root));
    bool hit_limit = false;
    while (!open_.empty()) {
      if (nodes_ >= opts_.node_limit) { hit_limit = true; break; }
      Node node = open_.top();
      open_.pop();
      if (node.snapshot) --snapshots_in_heap_;
      if (pruned(node.bound)) continue;
      Tableau t = restore(node);
      const long before = t.iterations();
      t.set_bounds(node.var, node.value, node.value);
      const auto st = t.dual();
      lp_iterations_ += t.iterations() - before;
      ++nodes_;
      if (st == SolveStatus::IterationLimit) { hit_limit = true; break; }
      if (st != SolveStatus::Optimal) continue;
      if (observer_) observer_->on_child(node.bound, t.objective());
      dive(std::move(t));
    }
    out.nodes = nodes_;
    out.lp_iterations = lp_iterations_;
    double bound = incumbent_obj_;
    if (hit_limit) {
      // Open nodes still carry parent bounds.
      auto copy = open_;
      while (!copy.empty()) { bound = std::min(bound, copy.top().bound); copy.pop(); }
    }
    out.best_bound = bound;
    if (!has_incumbent_) {
      out.status = hit_limit ? SolveStatus::NodeLimit : SolveStatus::Infeasible;
      return out;
    }
    out.status = hit_limit ? SolveStatus::NodeLimit : SolveStatus::Optimal;
    out.values = incumbent_;
    out.objective = incumbent_obj_;
    out.gap = std::max(0.0, incumbent_obj_ - bound);
    return out;
  }

 private:
  [[nodiscard]] bool pruned(double bound) const {
    if (!has_incumbent_) return false;
    const double tol = std::max(opts_.absolute_gap, opts_.relative_gap * std::abs(incumbent_obj_));
    return bound >= incumbent_obj_ - tol;
  }

  /// Depth-first from an LP-optimal tableau; siblings go to the open heap.
  void dive(Tableau t) {
    while (true) {
      const double obj = t.objective();
      if (pruned(obj)) return;
      const Eigen::VectorXd x = t.structural();
      Eigen::Index branch = -1;
      double best = -1.0;
      for (auto j : problem_.binaries) {
        const double f = x(j) - std::floor(x(j));
        const double dist = std::min(f, 1.0 - f);
        if (dist > opts_.integrality_tol && dist > best + 1e-12) {
          best = dist;
          branch = j;
        }
      }
      if (branch < 0) {
        accept(std::move(t));
        return;
      }
      const double first = x(branch) >= 0.5 ? 1.0 : 0.0;
      if (nodes_ >= opts_.node_limit) {
        push(t, obj, branch, first);
        push(t, obj, branch, 1.0 - first);
        return;
      }
      push(t, obj, branch, 1.0 - first);
      const long before = t.iterations();
      t.set_bounds(branch, first, first);
      const auto st = t.dual();
      lp_iterations_ += t.iterations() - before;
      ++nodes_;
      if (st != SolveStatus::Optimal) return;
      if (observer_) observer_->on_child(obj, t.objective());
    }
  }

  void push(const Tableau& parent, double bound, Eigen::Index var, double value) {
    Node node{bound, sequence_++, nullptr, nullptr, var, value};
    if (snapshots_in_heap_ < kMaxSnapshots) {
      node.snapshot = std::make_shared<const Tableau>(parent);
      ++snapshots_in_heap_;
    } else {
      node.basis = std::make_shared<const Tableau::Basis>(parent.basis());
    }
    open_.push(std::move(node));
  }

  Tableau restore(const Node& node) {
    if (node.snapshot) return *node.snapshot;
    Tableau t(problem_.lp, opts_);
    t.load(*node.basis);
    return t;
  }

  void accept(Tableau t) {
    // Snap binaries exactly and re-optimize the continuous part.
    const Eigen::VectorXd x = t.structural();
    const long before = t.iterations();
    for (auto j : problem_.binaries) {
      const double v = std::round(x(j));
      t.set_bounds(j, v, v);
    }
    const auto st = t.dual();
    lp_iterations_ += t.iterations() - before;
    if (st != SolveStatus::Optimal) return;
    const double obj = t.objective();
    if (!has_incumbent_ || obj < incumbent_obj_) {
      has_incumbent_ = true;
      incumbent_obj_ = obj;
      incumbent_ = t.structural();
      for (auto j : problem_.binaries) incumbent_(j) = std::round(incumbent_(j));
    }
  }

  const MilpProblem& problem_;
  SolverOptions opts_;
  BranchObserver* observer_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
  bool has_incumbent_ = false;
  double incumbent_obj_ = kInfinity;
  Eigen::VectorXd incumbent_;
  long nodes_ = 0;
  long sequence_ = 0;
  long snapshots_in_heap_ = 0;
  long lp_iterations_ = 0;
};

}  // namespace

MilpSolution solve_milp(const MilpProblem& problem, const SolverOptions& opts,
                        BranchObserver* observer, const Eigen::VectorXd* incumbent) {
  problem.validate();
  opts.validate();
  if (problem.binaries.empty()) {
    const auto lp = solve_lp(problem.lp, opts);
    MilpSolution s;
    s.status = lp.status;
    s.values = lp.values;
    s.objective = lp.objective;
    s.best_bound = lp.objective;
    s.gap = lp.status == SolveStatus::Optimal ? 0.0 : kInfinity;
    s.nodes = 1;
    s.lp_iterations = lp.iterations;
    return s;
  }
  if (incumbent != nullptr && incumbent->size() != problem.lp.num_vars()) {
    throw std::invalid_argument("solve_milp: incumbent has wrong size");
  }
  return BranchAndBound(problem, opts, observer, incumbent).run();
}

struct FixedBinarySolver::Impl {
  MilpProblem problem;
  SolverOptions opts;
  std::unique_ptr<Tableau> tableau;
  bool usable = false;
};

FixedBinarySolver::FixedBinarySolver(const MilpProblem& problem, const SolverOptions& opts)
    : impl_(std::make_unique<Impl>()) {
  problem.validate();
  opts.validate();
  impl_->problem = problem;
  impl_->opts = opts;
}

FixedBinarySolver::~FixedBinarySolver() = default;

LpSolution FixedBinarySolver::solve(const Eigen::VectorXd& assignment) {
  auto& im = *impl_;
  if (assignment.size() != static_cast<Eigen::Index>(im.problem.binaries.size())) {
    throw std::invalid_argument("FixedBinarySolver: assignment size mismatch");
  }
  if (!im.usable) {
    im.tableau = std::make_unique<Tableau>(im.problem.lp, im.opts);
  }
  auto& t = *im.tableau;
  const long before = t.iterations();
  for (std::size_t b = 0; b < im.problem.binaries.size(); ++b) {
    const double v = assignment(static_cast<Eigen::Index>(b)) > 0.5 ? 1.0 : 0.0;
    t.set_bounds(im.problem.binaries[b], v, v, false);
  }
  t.refresh_basics();
  const auto st = im.usable ? t.dual() : t.primal();
  // A failed solve may leave a dual infeasible basis; start cold next time.
  im.usable = st == SolveStatus::Optimal;
  LpSolution out = finish(t, st);
  out.iterations = t.iterations() - before;
  if (!im.usable) im.tableau.reset();
  return out;
}

MilpSolution enumerate_exact(const MilpProblem& problem, const SolverOptions& opts) {
  problem.validate();
  opts.validate();
  const auto k = problem.binaries.size();
  if (k > 20) {
    throw std::invalid_argument("enumerate_exact: " + std::to_string(k) +
                                " binaries exceeds the limit of 20");
  }
  MilpSolution best;
  best.status = SolveStatus::Infeasible;
  bool unbounded = false;
  LpProblem fixed = problem.lp;
  for (unsigned long mask = 0; mask < (1UL << k); ++mask) {
    bool admissible = true;
    for (std::size_t b = 0; b < k; ++b) {
      const auto j = problem.binaries[b];
      const double v = (mask >> b) & 1UL ? 1.0 : 0.0;
      if (v < problem.lp.lower(j) || v > problem.lp.upper(j)) { admissible = false; break; }
      fixed.lower(j) = v;
      fixed.upper(j) = v;
    }
    if (!admissible) continue;
    const auto lp = solve_lp(fixed, opts);
    ++best.nodes;
    best.lp_iterations += lp.iterations;
    if (lp.status == SolveStatus::Unbounded) unbounded = true;
    if (lp.status == SolveStatus::Optimal && lp.objective < best.objective) {
      best.status = SolveStatus::Optimal;
      best.objective = lp.objective;
      best.values = lp.values;
    }
  }
  if (unbounded) {
    best.status = SolveStatus::Unbounded;
    best.values.resize(0);
    best.objective = -kInfinity;
    return best;
  }
  if (best.status == SolveStatus::Optimal) {
    best.best_bound = best.objective;
    best.gap = 0.0;
  }
  return best;
}

void write_lp_format(std::ostream& out, const MilpProblem& problem) {
  const auto& p = problem.lp;
  auto name = [&](Eigen::Index j) {
    if (static_cast<std::size_t>(j) < p.names.size() && !p.names[static_cast<std::size_t>(j)].empty()) {
      return p.names[static_cast<std::size_t>(j)];
    }
    return "x" + std::to_string(j);
  };
  auto term = [&](std::ostringstream& line, double a, Eigen::Index j, bool first) {
    if (a < 0) line << (first ? "- " : " - ");
    else if (!first) line << " + ";
    line << std::abs(a) << ' ' << name(j);
  };
  out.precision(17);
  out << "\\ generated by hpsim\nMinimize\n obj:";
  {
    std::ostringstream line;
    line.precision(17);
    bool first = true;
    for (Eigen::Index j = 0; j < p.num_vars(); ++j) {
      if (p.objective(j) == 0.0) continue;
      term(line, p.objective(j), j, first);
      first = false;
    }
    out << ' ' << (first ? "0 x0" : line.str()) << "\nSubject To\n";
  }
  for (Eigen::Index i = 0; i < p.num_rows(); ++i) {
    std::ostringstream line;
    line.precision(17);
    bool first = true;
    for (Eigen::Index j = 0; j < p.num_vars(); ++j) {
      if (p.constraints(i, j) == 0.0) continue;
      term(line, p.constraints(i, j), j, first);
      first = false;
    }
    if (first) line << "0 x0";
    const char* rel = "=";
    switch (p.relations[static_cast<std::size_t>(i)]) {
      case Relation::LessEqual: rel = "<="; break;
      case Relation::GreaterEqual: rel = ">="; break;
      case Relation::Equal: rel = "="; break;
    }
    out << " c" << i << ": " << line.str() << ' ' << rel << ' ' << p.rhs(i) << '\n';
  }
  out << "Bounds\n";
  for (Eigen::Index j = 0; j < p.num_vars(); ++j) {
    const double lo = p.lower(j);
    const double up = p.upper(j);
    if (lo == -kInfinity && up == kInfinity) out << ' ' << name(j) << " free\n";
    else if (up == kInfinity) out << ' ' << lo << " <= " << name(j) << '\n';
    else if (lo == -kInfinity) out << " -inf <= " << name(j) << " <= " << up << '\n';
    else out << ' ' << lo << " <= " << name(j) << " <= " << up << '\n';
  }
  if (!problem.binaries.empty()) {
    out << "Binaries\n";
    for (auto j : problem.binaries) out << ' ' << name(j) << '\n';
  }
  out << "End\n";
}

}  // namespace hps
