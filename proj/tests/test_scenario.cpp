#include "hps/demand.hpp"
#include "hps/scenario.hpp"

#include <doctest.h>

#include <algorithm>

using namespace hps;

namespace {

std::map<MaterialId, double> constant_average(const ProductionStructure& s) {
  std::map<MaterialId, double> avg;
  for (const MaterialId p : s.finished()) avg[p] = forecast_value(DemandPattern::Constant, p, 1);
  return avg;
}

}  // namespace

TEST_CASE("structure: flow_many routes product 10 on M5 from component 20") {
  const auto s = build_structure(StructureKind::FlowMany);
  const auto& m = s.material(10);
  CHECK(m.kind == MaterialKind::Finished);
  REQUIRE(m.routing.size() == 1);
  CHECK(m.routing[0] == 5);
  REQUIRE(m.components.size() == 1);
  CHECK(m.components[0].component == 20);
  CHECK(m.components[0].quantity == 1);
  CHECK(s.finished().size() == 8);
}

TEST_CASE("structure: job_many material 22 has two operations") {
  const auto s = build_structure(StructureKind::JobMany);
  const auto& m = s.material(22);
  CHECK(m.routing == std::vector<MachineId>{6, 4});
  REQUIRE(m.components.size() == 1);
  CHECK(m.components[0].component == 32);
}

TEST_CASE("structure: flow_low has four finished products") {
  const auto s = build_structure(StructureKind::FlowLow);
  CHECK(s.finished() == std::vector<MaterialId>{10, 11, 12, 13});
}

TEST_CASE("structure: presets are well formed") {
  for (const auto k : {StructureKind::FlowMany, StructureKind::FlowLow, StructureKind::JobMany}) {
    const auto s = build_structure(k);
    CHECK(s.machines().size() == 6);
    for (const auto& m : s.materials()) {
      if (m.kind == MaterialKind::Raw) {
        CHECK(m.routing.empty());
        CHECK(m.components.empty());
      } else {
        CHECK(!m.routing.empty());
        for (const auto& c : m.components) CHECK(c.quantity == 1);
      }
    }
    // Parents come before their components.
    const auto& order = s.planning_order();
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (const auto& c : s.material(order[i]).components) {
        const auto it = std::find(order.begin(), order.end(), c.component);
        if (it != order.end()) CHECK(it - order.begin() > static_cast<std::ptrdiff_t>(i));
      }
    }
    for (const auto& m : s.machines()) CHECK(m.capacity[0] < m.capacity[1]);
  }
}

TEST_CASE("structure: cycles and dangling components are rejected") {
  std::vector<Material> cyc{{1, MaterialKind::Finished, {{2, 1}}, {1}},
                            {2, MaterialKind::Sub, {{1, 1}}, {2}}};
  CHECK_THROWS_AS(ProductionStructure(StructureKind::FlowMany, cyc, {}), std::invalid_argument);
  std::vector<Material> dangling{{1, MaterialKind::Finished, {{9, 1}}, {1}}};
  CHECK_THROWS_AS(ProductionStructure(StructureKind::FlowMany, dangling, {}), std::invalid_argument);
}

TEST_CASE("calibration: finished-product machines at shop load 2.5") {
  const auto fm = build_structure(StructureKind::FlowMany);
  const auto t = calibrate_processing_times(fm, constant_average(fm), 2.5);
  CHECK(t.target_hours == doctest::Approx(400.0));
  CHECK(t.per_machine.at(5) == doctest::Approx(0.08));
  CHECK(t.per_machine.at(6) == doctest::Approx(0.08));
  CHECK(t.piece_ops.at(5) == doctest::Approx(5000.0));
  // M1..M4 see other piece counts; times follow so loads stay equal.
  CHECK(t.per_machine.at(1) == doctest::Approx(400.0 / 4500.0));
  CHECK(t.per_machine.at(2) == doctest::Approx(400.0 / 5500.0));

  const auto fl = build_structure(StructureKind::FlowLow);
  const auto tl = calibrate_processing_times(fl, constant_average(fl), 2.5);
  for (const auto& [j, a] : tl.per_machine) CHECK(a == doctest::Approx(0.16));
}

TEST_CASE("calibration: job_many M4 carries 7500 piece-operations") {
  const auto s = build_structure(StructureKind::JobMany);
  const auto t = calibrate_processing_times(s, constant_average(s), 2.5);
  CHECK(t.piece_ops.at(4) == doctest::Approx(7500.0));
  CHECK(t.per_machine.at(4) == doctest::Approx(400.0 / 7500.0));
}

TEST_CASE("calibration: every machine carries rho * 160 hours") {
  for (const auto k : {StructureKind::FlowMany, StructureKind::FlowLow, StructureKind::JobMany}) {
    const auto s = build_structure(k);
    for (const double rho : {2.2, 2.5, 2.8}) {
      const auto t = calibrate_processing_times(s, constant_average(s), rho);
      for (const auto& [j, a] : t.per_machine) {
        CHECK(a * t.piece_ops.at(j) == doctest::Approx(rho * 160.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("cost rates by level") {
  const auto med = cost_rates(CostLevel::Med, CostLevel::Med);
  CHECK(med.internal == 100.0);
  CHECK(med.external == 200.0);
  CHECK(med.backorder == 19.0);
  CHECK(med.holding_monthly() == doctest::Approx(28.0 * med.holding_finished));
  CHECK(med.internal < med.external);
}

TEST_CASE("calendar arithmetic") {
  const Calendar c;
  CHECK(c.capacity(0) == 320.0);
  CHECK(c.capacity(1) == 480.0);
  CHECK(c.days_per_year() == 336);
  CHECK(c.month_of(27.9) == 0);
  CHECK(c.month_of(28.0) == 1);
  CHECK(Calendar::is_working_day(4));
  CHECK(!Calendar::is_working_day(5));
  CHECK(!Calendar::is_working_day(6));
  CHECK(c.working_day_index(28) == 0);
  CHECK(c.working_day_index(33) == -1);
  CHECK(c.working_day_index(28 + 25) == 19);
}

TEST_CASE("config: basic scenario parses") {
  const auto c = parse_scenario(R"({"structure": "flow_many", "demand_pattern": "constant",
    "rho": 2.5, "capacity_cost_level": "med", "backorder_cost_level": "med",
    "alpha": 0.25, "eta": 0.84})");
  CHECK(c.structure == StructureKind::FlowMany);
  CHECK(c.pattern == DemandPattern::Constant);
  CHECK(c.alpha == 0.25);
  CHECK(c.eta == 0.84);
  CHECK(c.replications == 10);
  CHECK(c.scenario_id() == "f_m_c");
}

TEST_CASE("config: out of range and unknown keys are rejected") {
  CHECK_THROWS_AS((void)parse_scenario(R"({"eta": 1.02})"), ConfigError);
  CHECK_THROWS_AS((void)parse_scenario(R"({"rho": 2.6})"), ConfigError);
  CHECK_THROWS_AS((void)parse_scenario(R"({"alpha": -0.1})"), ConfigError);
  CHECK_THROWS_AS((void)parse_scenario(R"({"etta": 0.9})"), ConfigError);
  CHECK_THROWS_AS((void)parse_scenario(R"({"structure": "flow_few"})"), ConfigError);
  CHECK_THROWS_AS((void)parse_scenario(R"({"years": 2, "warmup_years": 2})"), ConfigError);
  CHECK_THROWS_AS((void)parse_scenario("[1, 2]"), ConfigError);
  CHECK_THROWS_AS((void)parse_scenario("{"), ConfigError);
  CHECK_THROWS_AS((void)parse_scenario(R"({"plan_holding_days": 0})"), ConfigError);
  try {
    (void)parse_scenario(R"({"eta": 1.02})");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "eta");
  }
}

TEST_CASE("config: JSON round trip") {
  ScenarioConfig c;
  c.structure = StructureKind::JobMany;
  c.pattern = DemandPattern::Seasonal;
  c.rho = 2.8;
  c.capacity_cost = CostLevel::High;
  c.backorder_cost = CostLevel::Low;
  c.alpha = 0.35;
  c.eta = 0.72;
  c.noise = NoiseMode::Degenerate;
  c.plan_holding_days = 1.0;
  const auto back = parse_scenario(to_json(c));
  CHECK(back.scenario_id() == "j_m_s");
  CHECK(back.rho == 2.8);
  CHECK(back.capacity_cost == CostLevel::High);
  CHECK(back.backorder_cost == CostLevel::Low);
  CHECK(back.alpha == 0.35);
  CHECK(back.eta == 0.72);
  CHECK(back.noise == NoiseMode::Degenerate);
  CHECK(back.plan_holding_days == 1.0);
}

TEST_CASE("enumeration grids") {
  const auto e = eta_grid();
  REQUIRE(e.size() == 26);
  CHECK(e.front() == doctest::Approx(0.5));
  CHECK(e.back() == doctest::Approx(1.0));
  CHECK(e[17] == doctest::Approx(0.84));
  const auto a = alpha_grid();
  REQUIRE(a.size() == 11);
  CHECK(a.back() == doctest::Approx(0.5));
}
