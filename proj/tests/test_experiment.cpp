#include "hps/experiment.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace hps;

namespace {

RunResult row(const std::string& id, double alpha, double eta, double cost, int rep = 0,
              double service = 1.0) {
  RunResult r;
  r.scenario_id = id;
  r.pattern = id.back() == 's' ? DemandPattern::Seasonal : DemandPattern::Constant;
  r.alpha = alpha;
  r.eta = eta;
  r.rep = rep;
  r.cost.internal = cost;
  r.service_level = service;
  return r;
}

ScenarioConfig short_config() {
  ScenarioConfig c;
  c.years = 1;
  c.warmup_years = 0;
  c.replications = 1;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("optimal eta: lowest mean cost over replications") {
  const std::vector<RunResult> rows{row("f_m_c", 0.1, 0.8, 10.0, 0), row("f_m_c", 0.1, 0.8, 12.0, 1),
                                    row("f_m_c", 0.1, 0.9, 9.0, 0, 0.5), row("f_m_c", 0.1, 0.9, 11.0, 1)};
  const auto best = select_optimal_eta(rows);
  CHECK(best.eta == doctest::Approx(0.9));
  CHECK(best.cost == doctest::Approx(10.0));
  CHECK(best.service == doctest::Approx(0.75));
  const auto means = mean_by_eta(rows);
  REQUIRE(means.size() == 2);
  CHECK(means[0].eta == doctest::Approx(0.8));
  CHECK(means[0].runs == 2);
}

TEST_CASE("optimal eta: exact ties go to the lower eta") {
  const std::vector<RunResult> rows{row("f_m_c", 0.0, 0.9, 10.0), row("f_m_c", 0.0, 0.7, 10.0),
                                    row("f_m_c", 0.0, 0.8, 10.0)};
  CHECK(select_optimal_eta(rows).eta == doctest::Approx(0.7));
}

TEST_CASE("optimal eta: rows must share scenario and alpha") {
  CHECK_THROWS_AS((void)select_optimal_eta({row("f_m_c", 0.0, 0.9, 1.0), row("f_m_c", 0.1, 0.9, 1.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)select_optimal_eta({row("f_m_c", 0.0, 0.9, 1.0), row("f_m_s", 0.0, 0.9, 1.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)select_optimal_eta({}), std::invalid_argument);
}

TEST_CASE("regression: exact line") {
  const auto r = regress_alpha({{0.0, 0.9}, {0.25, 0.8}, {0.5, 0.7}});
  CHECK(r.slope == doctest::Approx(-0.4));
  CHECK(r.intercept == doctest::Approx(0.9));
  CHECK(r.r == doctest::Approx(-1.0));
  CHECK(r.r_defined);
  CHECK(r.percent_change == doctest::Approx(-0.2 / 0.9 * 100.0));
}

TEST_CASE("regression: constant response has no correlation") {
  const auto r = regress_alpha({{0.0, 0.84}, {0.1, 0.84}, {0.2, 0.84}});
  CHECK(r.slope == 0.0);
  CHECK(r.intercept == doctest::Approx(0.84));
  CHECK(!r.r_defined);
  CHECK(r.percent_change == 0.0);
}

TEST_CASE("regression: degenerate inputs") {
  CHECK_THROWS_AS((void)regress_alpha({{0.0, 1.0}, {0.5, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS((void)regress_alpha({{0.2, 1.0}, {0.2, 2.0}, {0.2, 3.0}}), std::invalid_argument);
}

TEST_CASE("report: deltas relative to the baseline scenario") {
  const std::vector<RunResult> rows{row("f_m_c", 0.0, 0.84, 13637.0), row("f_m_c", 0.0, 0.9, 14000.0),
                                    row("f_m_s", 0.0, 0.84, 14590.0), row("f_m_s", 0.0, 0.8, 15000.0)};
  const auto rep = emit_report(rows, "f_m_c");
  REQUIRE(rep.summaries.size() == 2);
  CHECK(rep.summaries[0].scenario_id == "f_m_c");
  CHECK(rep.summaries[0].cost_delta == 0.0);
  CHECK(rep.summaries[0].eta_delta == 0.0);
  CHECK(rep.summaries[1].scenario_id == "f_m_s");
  CHECK(rep.summaries[1].cost_delta == doctest::Approx(6.9883).epsilon(1e-4));
  CHECK(rep.summaries[1].eta_delta == doctest::Approx(0.0));
  CHECK(rep.regressions.empty());
  CHECK_THROWS_AS((void)emit_report(rows, "j_m_c"), std::invalid_argument);
}

TEST_CASE("report: sensitivity averages one factor level at a time") {
  std::vector<RunResult> rows;
  for (const double rho : {2.2, 2.8}) {
    auto a = row("f_m_c", 0.0, 0.8, rho == 2.2 ? 100.0 : 200.0);
    auto b = row("f_m_c", 0.0, 0.9, 300.0);
    a.rho = b.rho = rho;
    rows.push_back(a);
    rows.push_back(b);
  }
  const auto rep = emit_report(rows, "f_m_c");
  int seen = 0;
  for (const auto& s : rep.sensitivity) {
    if (s.factor == "rho" && s.level == "2.2") {
      CHECK(s.cost == doctest::Approx(100.0));
      ++seen;
    }
    if (s.factor == "rho" && s.level == "2.8") {
      CHECK(s.cost == doctest::Approx(200.0));
      ++seen;
    }
    if (s.factor == "capacity_cost") {
      CHECK(s.cost == doctest::Approx(150.0));
      CHECK(s.eta == doctest::Approx(0.8));
      CHECK(s.cells == 2);
      ++seen;
    }
  }
  CHECK(seen == 3);
  REQUIRE(rep.summaries.size() == 1);
  CHECK(rep.summaries[0].cost == doctest::Approx(150.0));
}

TEST_CASE("report: regression over three alpha levels") {
  std::vector<RunResult> rows;
  for (const double a : {0.0, 0.25, 0.5}) {
    const double best = 0.9 - 0.4 * a;
    for (const double e : {0.7, 0.8, 0.9}) rows.push_back(row("f_m_c", a, e, 100.0 + 1000.0 * std::abs(e - best)));
  }
  const auto rep = emit_report(rows, "f_m_c");
  bool found = false;
  for (const auto& g : rep.regressions) {
    if (g.target != "eta") continue;
    found = true;
    CHECK(g.points == 3);
    CHECK(g.fit.slope == doctest::Approx(-0.4));
    CHECK(g.fit.r == doctest::Approx(-1.0));
  }
  CHECK(found);
  std::ostringstream text, csv;
  write_report_text(text, rep);
  write_report_csv(csv, rep);
  CHECK(!text.str().empty());
  CHECK(csv.str().rfind("table,scenario_id,factor,level,alpha,eta,cost,", 0) == 0);
}

TEST_CASE("results CSV round trip") {
  RunResult r = row("f_m_s", 0.15, 0.84, 1234.5678901234, 2, 0.987654321);
  r.structure = StructureKind::FlowMany;
  r.rho = 2.8;
  r.capacity_cost = CostLevel::High;
  r.backorder_cost = CostLevel::Low;
  r.seed = 18446744073709551557ULL;
  r.cost.external = 1.5;
  r.cost.holding = 2.25;
  r.cost.backorder = 1e-7;
  r.utilization = {0.1, 0.2, 0.3, 0.4, 0.5, 0.987654321012};
  std::stringstream io;
  write_results_csv(io, {r});
  const auto back = read_results_csv(io);
  REQUIRE(back.size() == 1);
  CHECK(format_row(back[0]) == format_row(r));
  CHECK(back[0].seed == r.seed);
  CHECK(back[0].capacity_cost == CostLevel::High);
  std::istringstream bad("scenario_id,oops\n");
  CHECK_THROWS_AS((void)read_results_csv(bad), ConfigError);
}

TEST_CASE("seeds: common random numbers across alpha and eta") {
  auto c = short_config();
  const auto s0 = cell_seed(c, 0);
  c.alpha = 0.4;
  c.eta = 0.6;
  CHECK(cell_seed(c, 0) == s0);
  CHECK(cell_seed(c, 1) != s0);
  c.rho = 2.2;
  CHECK(cell_seed(c, 0) != s0);
}

TEST_CASE("sweep: one row per cell, reproducible") {
  ExperimentPlan plan;
  plan.base = short_config();
  plan.scenarios = {ScenarioFactors::of(plan.base)};
  plan.alphas = {0.0, 0.2};
  plan.etas = {0.8, 0.9, 1.0};
  plan.replications = 1;
  CHECK(plan.cells() == 6);
  SweepOptions opts;
  opts.threads = 2;
  const auto a = sweep_grid(plan, opts);
  CHECK(a.failures.empty());
  REQUIRE(a.rows.size() == 6);
  for (std::size_t i = 1; i < a.rows.size(); ++i) CHECK(primary_key_less(a.rows[i - 1], a.rows[i]));
  const auto b = sweep_grid(plan);
  REQUIRE(b.rows.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(format_row(a.rows[i]) == format_row(b.rows[i]));
  const auto single = run_replication([&] {
    auto c = plan.base;
    c.alpha = 0.2;
    c.eta = 0.9;
    return c;
  }(), 0);
  CHECK(format_row(single) == format_row(a.rows[4]));
}

TEST_CASE("sweep: empty grids are rejected") {
  ExperimentPlan plan;
  plan.base = short_config();
  plan.scenarios = {ScenarioFactors::of(plan.base)};
  plan.alphas = {0.0};
  CHECK_THROWS_AS(plan.validate(), ConfigError);
  CHECK_THROWS_AS((void)sweep_grid(plan), ConfigError);
  plan.etas = {1.2};
  CHECK_THROWS_AS(plan.validate(), ConfigError);
}

TEST_CASE("factor grid covers every scenario once") {
  const auto g = full_factor_grid();
  CHECK(g.size() == 162);
  std::set<std::string> keys;
  for (const auto& f : g) {
    ScenarioConfig c;
    f.apply(c);
    keys.insert(c.scenario_id() + "/" + std::to_string(c.rho) + "/" +
                std::string(to_string(c.capacity_cost)) + "/" + std::string(to_string(c.backorder_cost)));
  }
  CHECK(keys.size() == 162);
}
