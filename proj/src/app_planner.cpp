#include "hps/app_planner.hpp"

#include "hps/demand.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

namespace hps {

void AppModel::validate() const {
  const auto P = static_cast<Eigen::Index>(products.size());
  const auto J = static_cast<Eigen::Index>(machines.size());
  if (horizon < 1) throw std::invalid_argument("AppModel: horizon must be positive");
  if (forecast.rows() != P || forecast.cols() < horizon) {
    throw std::invalid_argument("AppModel: forecast does not cover the planning horizon");
  }
  if (hours_per_piece.rows() != P || hours_per_piece.cols() != J) {
    throw std::invalid_argument("AppModel: processing-time matrix has wrong shape");
  }
  for (const auto& k : capacity) {
    if (k.rows() < horizon || k.cols() != J) {
      throw std::invalid_argument("AppModel: capacity matrix has wrong shape");
    }
  }
  if (initial_inventory.size() != P) {
    throw std::invalid_argument("AppModel: initial inventory has wrong size");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("AppModel: eta outside [0, 1]");
  if ((hours_per_piece.array() < 0).any() || (forecast.array() < 0).any() ||
      !initial_inventory.allFinite()) {
    throw std::invalid_argument("AppModel: negative data");
  }
}

AppMilp build_app_model(const AppModel& model) {
  model.validate();
  AppMilp out;
  auto& L = out.layout;
  L.products = static_cast<int>(model.products.size());
  L.months = model.horizon;
  L.machines = static_cast<int>(model.machines.size());

  LpBuilder b;
  for (int p = 0; p < L.products; ++p) {
    for (int t = 0; t < L.months; ++t) {
      b.add_variable(0.0, 0.0, kInfinity,
                     "x_" + std::to_string(model.products[p]) + "_" + std::to_string(t + 1));
    }
  }
  for (int p = 0; p < L.products; ++p) {
    for (int t = 0; t < L.months; ++t) {
      b.add_variable(model.holding_rate, 0.0, kInfinity,
                     "l_" + std::to_string(model.products[p]) + "_" + std::to_string(t + 1));
    }
  }
  for (int t = 0; t < L.months; ++t) {
    for (int j = 0; j < L.machines; ++j) {
      b.add_variable(model.external_rate, 0.0, kInfinity,
                     "e_" + std::to_string(t + 1) + "_M" + std::to_string(model.machines[j]));
    }
  }
  for (int t = 0; t < L.months; ++t) {
    for (int j = 0; j < L.machines; ++j) {
      const double k1 = model.capacity[0](t, j);
      const double k2 = model.capacity[1](t, j);
      b.add_variable(model.internal_rate * (k2 - k1), 0.0, 1.0,
                     "y_" + std::to_string(t + 1) + "_M" + std::to_string(model.machines[j]));
      out.objective_constant += model.internal_rate * k1;
    }
  }
  // Capacity: sum_p a x - eta (K2 - K1) y - e <= eta K1.
  for (int t = 0; t < L.months; ++t) {
    for (int j = 0; j < L.machines; ++j) {
      std::vector<std::pair<Eigen::Index, double>> row;
      for (int p = 0; p < L.products; ++p) {
        const double a = model.hours_per_piece(p, j);
        if (a != 0.0) row.emplace_back(L.production(p, t), a);
      }
      const double k1 = model.capacity[0](t, j);
      const double k2 = model.capacity[1](t, j);
      row.emplace_back(L.shift(t, j), -model.eta * (k2 - k1));
      row.emplace_back(L.external(t, j), -1.0);
      b.add_row(row, Relation::LessEqual, model.eta * k1);
    }
  }
  // Balance: l_t - l_{t-1} - x_t = -F_t (l_0 moves to the right-hand side).
  for (int p = 0; p < L.products; ++p) {
    for (int t = 0; t < L.months; ++t) {
      std::vector<std::pair<Eigen::Index, double>> row{{L.inventory(p, t), 1.0},
                                                       {L.production(p, t), -1.0}};
      double rhs = -model.forecast(p, t);
      if (t > 0) row.emplace_back(L.inventory(p, t - 1), -1.0);
      else rhs += model.initial_inventory(p);
      b.add_row(row, Relation::Equal, rhs);
    }
  }
  out.problem.lp = b.build();
  for (int t = 0; t < L.months; ++t) {
    for (int j = 0; j < L.machines; ++j) out.problem.binaries.push_back(L.shift(t, j));
  }
  return out;
}

AppSolution decode_app_solution(const AppMilp& milp, const Eigen::VectorXd& v, double objective) {
  const auto& L = milp.layout;
  AppSolution s;
  s.production.resize(L.products, L.months);
  s.inventory.resize(L.products, L.months);
  s.external.resize(L.months, L.machines);
  s.shift_plan.resize(L.months, L.machines);
  for (int p = 0; p < L.products; ++p) {
    for (int t = 0; t < L.months; ++t) {
      s.production(p, t) = std::max(0.0, v(L.production(p, t)));
      s.inventory(p, t) = std::max(0.0, v(L.inventory(p, t)));
    }
  }
  for (int t = 0; t < L.months; ++t) {
    for (int j = 0; j < L.machines; ++j) {
      s.external(t, j) = std::max(0.0, v(L.external(t, j)));
      s.shift_plan(t, j) = v(L.shift(t, j)) > 0.5 ? 1 : 0;
    }
  }
  s.objective = objective + milp.objective_constant;
  return s;
}

namespace {

// Shift-plan local search. Candidate plans are scored by solving the LP with
// the binaries fixed; moves are single flips and whole-month settings.
class PlanSearch {
 public:
  PlanSearch(const AppMilp& milp, const SolverOptions& opts)
      : milp_(milp), solver_(milp.problem, opts) {}

  bool consider(const Eigen::MatrixXi& plan) {
    Eigen::VectorXd assignment(static_cast<Eigen::Index>(milp_.problem.binaries.size()));
    const auto& L = milp_.layout;
    for (int t = 0; t < L.months; ++t) {
      for (int j = 0; j < L.machines; ++j) assignment(t * L.machines + j) = plan(t, j);
    }
    auto r = solver_.solve(assignment);
    if (r.status != SolveStatus::Optimal) return false;
    const double tol = found() ? 1e-9 * std::max(1.0, std::abs(best_obj_)) : 0.0;
    if (r.objective < best_obj_ - tol) {
      best_obj_ = r.objective;
      best_values_ = std::move(r.values);
      best_plan_ = plan;
      return true;
    }
    return false;
  }

  void improve(int max_passes) {
    if (best_values_.size() == 0) return;
    const auto& L = milp_.layout;
    for (int pass = 0; pass < max_passes; ++pass) {
      bool changed = false;
      for (int t = 0; t < L.months; ++t) {
        for (int v = 0; v <= 1; ++v) {
          Eigen::MatrixXi cand = best_plan_;
          cand.row(t).setConstant(v);
          if (cand != best_plan_ && consider(cand)) changed = true;
        }
        for (int j = 0; j < L.machines; ++j) {
          Eigen::MatrixXi cand = best_plan_;
          cand(t, j) = 1 - cand(t, j);
          if (consider(cand)) changed = true;
        }
      }
      if (!changed) break;
    }
  }

  [[nodiscard]] bool found() const { return best_values_.size() > 0; }
  [[nodiscard]] const Eigen::VectorXd& values() const { return best_values_; }
  [[nodiscard]] double objective() const { return best_obj_; }

 private:
  const AppMilp& milp_;
  FixedBinarySolver solver_;
  double best_obj_ = kInfinity;
  Eigen::VectorXd best_values_;
  Eigen::MatrixXi best_plan_;
};

Eigen::MatrixXi plan_of(const AppMilp& milp, const Eigen::VectorXd& values) {
  const auto& L = milp.layout;
  Eigen::MatrixXi plan(L.months, L.machines);
  for (int t = 0; t < L.months; ++t) {
    for (int j = 0; j < L.machines; ++j) plan(t, j) = values(L.shift(t, j)) > 0.5 ? 1 : 0;
  }
  return plan;
}

}  // namespace

AppSolution solve_app(const AppModel& model, const SolverOptions& opts,
                      const Eigen::MatrixXi* start_plan) {
  const auto milp = build_app_model(model);
  const auto& L = milp.layout;
  PlanSearch search(milp, opts);
  search.consider(Eigen::MatrixXi::Ones(L.months, L.machines));
  search.consider(Eigen::MatrixXi::Zero(L.months, L.machines));
  for (int phase = 0; phase < 2; ++phase) {
    Eigen::MatrixXi alt(L.months, L.machines);
    for (int t = 0; t < L.months; ++t) alt.row(t).setConstant((t + phase) % 2);
    search.consider(alt);
  }
  if (start_plan != nullptr && start_plan->rows() == L.months && start_plan->cols() == L.machines) {
    search.consider(*start_plan);
  }
  search.improve(8);

  const auto result =
      solve_milp(milp.problem, opts, nullptr, search.found() ? &search.values() : nullptr);
  if (result.values.size() == 0) {
    throw SolverError(std::string("planning MILP returned no plan: ") + to_string(result.status));
  }
  Eigen::VectorXd values = result.values;
  double objective = result.objective;
  if (result.status != SolveStatus::Optimal) {
    search.consider(plan_of(milp, values));
    search.improve(8);
    if (search.objective() < objective) {
      values = search.values();
      objective = search.objective();
    }
  }
  auto s = decode_app_solution(milp, values, objective);
  s.status = result.status;
  s.gap = std::max(0.0, objective - result.best_bound);
  s.nodes = result.nodes;
  return s;
}

double AppAudit::worst() const {
  return std::max({shift_choice, capacity, balance, nonnegativity, binarity});
}

double app_objective(const AppModel& m, const AppSolution& s) {
  double total = 0.0;
  for (int t = 0; t < m.horizon; ++t) {
    for (std::size_t j = 0; j < m.machines.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      total += s.external(t, jj) * m.external_rate;
      for (int sp = 0; sp < kShiftPlans; ++sp) {
        total += m.capacity[static_cast<std::size_t>(sp)](t, jj) * m.internal_rate *
                 s.w(t, static_cast<int>(j), sp);
      }
    }
    for (std::size_t p = 0; p < m.products.size(); ++p) {
      total += m.holding_rate * s.inventory(static_cast<Eigen::Index>(p), t);
    }
  }
  return total;
}

AppAudit audit_app_solution(const AppModel& m, const AppSolution& s) {
  AppAudit a;
  const auto P = static_cast<Eigen::Index>(m.products.size());
  const auto J = static_cast<Eigen::Index>(m.machines.size());
  for (int t = 0; t < m.horizon; ++t) {
    for (Eigen::Index j = 0; j < J; ++j) {
      int chosen = 0;
      double available = 0.0;
      for (int sp = 0; sp < kShiftPlans; ++sp) {
        const int w = s.w(t, static_cast<int>(j), sp);
        a.binarity = std::max(a.binarity, static_cast<double>(w != 0 && w != 1));
        chosen += w;
        available += m.capacity[static_cast<std::size_t>(sp)](t, j) * w;
      }
      a.shift_choice = std::max(a.shift_choice, std::abs(chosen - 1.0));
      double load = 0.0;
      for (Eigen::Index p = 0; p < P; ++p) load += s.production(p, t) * m.hours_per_piece(p, j);
      a.capacity = std::max(a.capacity, load - (m.eta * available + s.external(t, j)));
      a.nonnegativity = std::max(a.nonnegativity, -s.external(t, j));
    }
    for (Eigen::Index p = 0; p < P; ++p) {
      const double prev = t == 0 ? m.initial_inventory(p) : s.inventory(p, t - 1);
      const double r = s.inventory(p, t) - (prev + s.production(p, t) - m.forecast(p, t));
      a.balance = std::max(a.balance, std::abs(r));
      a.nonnegativity = std::max({a.nonnegativity, -s.inventory(p, t), -s.production(p, t)});
    }
  }
  a.objective = std::abs(app_objective(m, s) - s.objective);
  return a;
}

Eigen::MatrixXd routing_hours(const ProductionStructure& structure, const ProcessingTimes& times,
                              const std::vector<MaterialId>& products,
                              const std::vector<MachineId>& machines) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(products.size()),
                                            static_cast<Eigen::Index>(machines.size()));
  std::function<void(Eigen::Index, MaterialId, double)> walk = [&](Eigen::Index row,
                                                                   MaterialId id, double qty) {
    const auto& mat = structure.material(id);
    for (std::size_t op = 0; op < mat.routing.size(); ++op) {
      const auto it = std::find(machines.begin(), machines.end(), mat.routing[op]);
      if (it == machines.end()) continue;
      a(row, it - machines.begin()) += qty * times.operation_hours(mat, op);
    }
    for (const auto& c : mat.components) walk(row, c.component, qty * c.quantity);
  };
  for (std::size_t p = 0; p < products.size(); ++p) {
    walk(static_cast<Eigen::Index>(p), products[p], 1.0);
  }
  return a;
}

Eigen::MatrixXd forecast_window(DemandPattern pattern, SeasonalPhase phase,
                                const std::vector<MaterialId>& products, int first, int months) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(products.size()), months);
  for (std::size_t p = 0; p < products.size(); ++p) {
    for (int t = 0; t < months; ++t) {
      const int month = ((first - 1 + t) % 12) + 1;
      f(static_cast<Eigen::Index>(p), t) = forecast_value(pattern, products[p], month, phase);
    }
  }
  return f;
}

AppModel make_app_model(const ProductionStructure& structure, const ProcessingTimes& times,
                        const ScenarioConfig& config, const Calendar& calendar, int first_month,
                        const Eigen::VectorXd& initial_inventory) {
  AppModel m;
  m.horizon = 12;
  m.products = structure.finished();
  for (const auto& machine : structure.machines()) m.machines.push_back(machine.id);
  m.forecast = forecast_window(config.pattern, config.seasonal_phase, m.products, first_month,
                               m.horizon);
  m.hours_per_piece = routing_hours(structure, times, m.products, m.machines);
  for (int s = 0; s < kShiftPlans; ++s) {
    m.capacity[static_cast<std::size_t>(s)] =
        Eigen::MatrixXd::Constant(m.horizon, static_cast<Eigen::Index>(m.machines.size()),
                                  calendar.capacity(s));
  }
  m.initial_inventory = initial_inventory;
  m.eta = config.eta;
  const auto rates = config.rates();
  m.internal_rate = rates.internal;
  m.external_rate = rates.external;
  m.holding_rate = rates.holding_finished * config.plan_holding_days;
  return m;
}

BindingPlan bind_plan(const AppModel& model, const AppSolution& s, int absolute_first_month,
                      int months) {
  months = std::min(months, model.horizon);
  BindingPlan b;
  b.first_month = absolute_first_month;
  b.production = s.production.leftCols(months);
  b.inventory = s.inventory.leftCols(months);
  b.initial_inventory = model.initial_inventory;
  b.external = s.external.topRows(months);
  b.shift_plan = s.shift_plan.topRows(months);
  return b;
}

void write_plan_csv(std::ostream& out, const AppModel& m, const AppSolution& s) {
  out << "month,kind,id,value\n";
  for (int t = 0; t < m.horizon; ++t) {
    for (std::size_t p = 0; p < m.products.size(); ++p) {
      const auto pp = static_cast<Eigen::Index>(p);
      out << t + 1 << ",x," << m.products[p] << ',' << s.production(pp, t) << '\n';
      out << t + 1 << ",l," << m.products[p] << ',' << s.inventory(pp, t) << '\n';
    }
    for (std::size_t j = 0; j < m.machines.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      out << t + 1 << ",w15,M" << m.machines[j] << ',' << s.shift_plan(t, jj) << '\n';
      out << t + 1 << ",e,M" << m.machines[j] << ',' << s.external(t, jj) << '\n';
    }
  }
}

}  // namespace hps
