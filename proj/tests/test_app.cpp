#include "hps/app_planner.hpp"
#include "hps/demand.hpp"

#include <doctest.h>

#include <sstream>

using namespace hps;

namespace {

AppModel single_cell(double pieces, double eta) {
  AppModel m;
  m.horizon = 1;
  m.products = {10};
  m.machines = {1};
  m.forecast = Eigen::MatrixXd::Constant(1, 1, pieces);
  m.hours_per_piece = Eigen::MatrixXd::Constant(1, 1, 1.0);
  m.capacity[0] = Eigen::MatrixXd::Constant(1, 1, 320.0);
  m.capacity[1] = Eigen::MatrixXd::Constant(1, 1, 480.0);
  m.initial_inventory = Eigen::VectorXd::Zero(1);
  m.eta = eta;
  return m;
}

AppModel basic_model(double eta, int first_month = 1,
                     DemandPattern pattern = DemandPattern::Constant) {
  ScenarioConfig c;
  c.eta = eta;
  c.pattern = pattern;
  const auto s = build_structure(c.structure);
  std::map<MaterialId, double> avg;
  for (const MaterialId p : s.finished()) avg[p] = forecast_value(DemandPattern::Constant, p, 1);
  const auto times = calibrate_processing_times(s, avg, c.rho);
  return make_app_model(s, times, c, Calendar{}, first_month,
                        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.finished().size())));
}

SolverOptions rolling_options() {
  SolverOptions o;
  o.node_limit = 50;
  return o;
}

}  // namespace

TEST_CASE("app: one machine-month picks the 10-shift plan when it suffices") {
  const auto s = solve_app(single_cell(320.0, 1.0));
  CHECK(s.shift_plan(0, 0) == 0);
  CHECK(s.external(0, 0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.objective == doctest::Approx(32000.0));
}

TEST_CASE("app: external hours fill the planned-utilization gap") {
  const auto s = solve_app(single_cell(320.0, 0.8));
  CHECK(s.shift_plan(0, 0) == 0);
  CHECK(s.external(0, 0) == doctest::Approx(64.0));
  CHECK(s.objective == doctest::Approx(44800.0));
}

TEST_CASE("app: variable counts for flow_many") {
  const auto milp = build_app_model(basic_model(0.9));
  CHECK(milp.layout.products == 8);
  CHECK(milp.layout.months == 12);
  CHECK(milp.layout.machines == 6);
  CHECK(milp.layout.size() == 96 + 96 + 72 + 72);
  CHECK(milp.problem.binaries.size() == 72);
}

TEST_CASE("app: full planned utilization fits in 15-shift plans without external hours") {
  const auto model = basic_model(1.0);
  const auto milp = build_app_model(model);
  // All 15-shift, x = F, l = 0, e = 0 satisfies every row.
  Eigen::VectorXd v = Eigen::VectorXd::Zero(milp.layout.size());
  for (int p = 0; p < milp.layout.products; ++p) {
    for (int t = 0; t < milp.layout.months; ++t) v(milp.layout.production(p, t)) = model.forecast(p, t);
  }
  for (int t = 0; t < milp.layout.months; ++t) {
    for (int j = 0; j < milp.layout.machines; ++j) v(milp.layout.shift(t, j)) = 1.0;
  }
  CHECK(max_violation(milp.problem.lp, v) <= 1e-9);
  const auto load = (model.forecast.col(0).transpose() * model.hours_per_piece).eval();
  for (Eigen::Index j = 0; j < load.size(); ++j) CHECK(load(j) == doctest::Approx(400.0));
}

TEST_CASE("app: eta zero pushes all load to external capacity") {
  auto model = single_cell(100.0, 0.0);
  const auto s = solve_app(model);
  CHECK(s.external(0, 0) == doctest::Approx(100.0));
  CHECK(s.shift_plan(0, 0) == 0);
  CHECK(s.objective == doctest::Approx(32000.0 + 200.0 * 100.0));
}

TEST_CASE("app: zero forecast costs only the cheapest shift plans") {
  auto model = basic_model(0.9);
  model.forecast.setZero();
  const auto s = solve_app(model, rolling_options());
  CHECK(s.production.cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(s.external.cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(s.shift_plan.maxCoeff() == 0);
  CHECK(s.objective == doctest::Approx(320.0 * 100.0 * 12 * 6));
}

TEST_CASE("app: rolling window wraps the seasonal year") {
  const std::vector<MaterialId> products{10, 11};
  const auto f = forecast_window(DemandPattern::Seasonal, SeasonalPhase::Prose, products, 9, 12);
  for (int t = 0; t < 12; ++t) {
    const int month = (8 + t) % 12 + 1;
    CHECK(f(0, t) == doctest::Approx(forecast_value(DemandPattern::Seasonal, 10, month)));
  }
  CHECK(f(0, 4) == doctest::Approx(forecast_value(DemandPattern::Seasonal, 10, 1)));
}

TEST_CASE("app: tight capacity ahead of a peak builds inventory") {
  AppModel m;
  m.horizon = 3;
  m.products = {10};
  m.machines = {1};
  m.forecast.resize(1, 3);
  m.forecast << 200.0, 300.0, 700.0;
  m.hours_per_piece = Eigen::MatrixXd::Constant(1, 1, 1.0);
  m.capacity[0] = Eigen::MatrixXd::Constant(3, 1, 320.0);
  m.capacity[1] = Eigen::MatrixXd::Constant(3, 1, 480.0);
  m.initial_inventory = Eigen::VectorXd::Zero(1);
  m.eta = 1.0;
  m.holding_rate = 28.0;
  const auto s = solve_app(m);
  const auto milp = build_app_model(m);
  const auto exact = enumerate_exact(milp.problem);
  CHECK(s.objective == doctest::Approx(exact.objective + milp.objective_constant));
  CHECK(s.inventory(0, 1) > 0.0);
}

TEST_CASE("app: negative initial inventory is made up") {
  auto m = single_cell(100.0, 1.0);
  m.initial_inventory(0) = -50.0;
  const auto s = solve_app(m);
  CHECK(s.production(0, 0) == doctest::Approx(150.0));
  CHECK(s.inventory(0, 0) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("app: model validation") {
  auto m = single_cell(100.0, 1.0);
  m.eta = 1.5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = single_cell(100.0, 1.0);
  m.forecast(0, 0) = -1.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = single_cell(100.0, 1.0);
  m.hours_per_piece.resize(2, 1);
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("app: planner solutions pass the independent audit") {
  for (const double eta : {0.5, 0.8, 0.96, 1.0}) {
    const auto model = basic_model(eta, 3, DemandPattern::Seasonal);
    const auto s = solve_app(model, rolling_options());
    const auto a = audit_app_solution(model, s);
    CHECK(a.worst() <= 1e-6);
    CHECK(a.objective <= 1e-6 * s.objective);
  }
}

TEST_CASE("app: objective does not increase with eta") {
  double previous = kInfinity;
  for (const double eta : {0.6, 0.7, 0.8, 0.9, 1.0}) {
    const double obj = solve_app(basic_model(eta), rolling_options()).objective;
    CHECK(obj <= previous * (1.0 + 1e-4));
    previous = obj;
  }
}

TEST_CASE("app: plan holding rate follows the configured days") {
  ScenarioConfig c;
  const auto s = build_structure(c.structure);
  std::map<MaterialId, double> avg;
  for (const MaterialId p : s.finished()) avg[p] = 1000.0;
  const auto times = calibrate_processing_times(s, avg, c.rho);
  const Eigen::VectorXd l0 = Eigen::VectorXd::Zero(8);
  CHECK(make_app_model(s, times, c, Calendar{}, 1, l0).holding_rate == doctest::Approx(28.0));
  c.plan_holding_days = 1.0;
  CHECK(make_app_model(s, times, c, Calendar{}, 1, l0).holding_rate == doctest::Approx(1.0));
}

TEST_CASE("app: binding plan keeps the first months") {
  const auto model = basic_model(0.9);
  const auto s = solve_app(model, rolling_options());
  const auto b = bind_plan(model, s, 8);
  CHECK(b.months() == 4);
  CHECK(b.first_month == 8);
  CHECK(b.production.col(3).isApprox(s.production.col(3)));
  CHECK(b.shift_plan.rows() == 4);
}

TEST_CASE("app: routing hours sum every operation below a product") {
  const auto s = build_structure(StructureKind::JobMany);
  ProcessingTimes t;
  for (int j = 1; j <= 6; ++j) t.per_machine[j] = 1.0;
  const auto a = routing_hours(s, t, {15}, {1, 2, 3, 4, 5, 6});
  // 15 on M5, 22 on M6 and M4, 32 on M1 and M3.
  CHECK(a(0, 0) == 1.0);
  CHECK(a(0, 1) == 0.0);
  CHECK(a(0, 2) == 1.0);
  CHECK(a(0, 3) == 1.0);
  CHECK(a(0, 4) == 1.0);
  CHECK(a(0, 5) == 1.0);
}

TEST_CASE("app: plan CSV lists every variable") {
  const auto m = single_cell(320.0, 1.0);
  const auto s = solve_app(m);
  std::ostringstream out;
  write_plan_csv(out, m, s);
  const auto text = out.str();
  CHECK(text.rfind("month,kind,id,value\n", 0) == 0);
  CHECK(text.find("1,x,10,") != std::string::npos);
  CHECK(text.find("1,w15,M1,0") != std::string::npos);
}
