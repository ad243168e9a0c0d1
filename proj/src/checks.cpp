#include "hps/checks.hpp"

#include "hps/app_planner.hpp"
#include "hps/demand.hpp"
#include "hps/experiment.hpp"
#include "hps/lp.hpp"
#include "hps/mps_mrp.hpp"
#include "hps/shopfloor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hps {

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

AppModel random_app_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(1, 3);
  std::uniform_int_distribution<int> two(1, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AppModel m;
  m.horizon = small(rng);
  const int P = two(rng);
  const int J = two(rng);
  for (int p = 0; p < P; ++p) m.products.push_back(10 + p);
  for (int j = 0; j < J; ++j) m.machines.push_back(1 + j);
  m.forecast.resize(P, m.horizon);
  for (int p = 0; p < P; ++p) {
    for (int t = 0; t < m.horizon; ++t) m.forecast(p, t) = std::round(500.0 * u(rng));
  }
  m.hours_per_piece.resize(P, J);
  for (int p = 0; p < P; ++p) {
    for (int j = 0; j < J; ++j) m.hours_per_piece(p, j) = u(rng) < 0.2 ? 0.0 : 0.05 + 0.5 * u(rng);
  }
  for (auto& k : m.capacity) k.resize(m.horizon, J);
  for (int t = 0; t < m.horizon; ++t) {
    for (int j = 0; j < J; ++j) {
      m.capacity[0](t, j) = 40.0 + 160.0 * u(rng);
      m.capacity[1](t, j) = m.capacity[0](t, j) * (1.2 + 0.6 * u(rng));
    }
  }
  m.initial_inventory.resize(P);
  for (int p = 0; p < P; ++p) m.initial_inventory(p) = std::round(-50.0 + 150.0 * u(rng));
  m.eta = 0.5 + 0.5 * u(rng);
  m.internal_rate = 50.0 + 100.0 * u(rng);
  m.external_rate = m.internal_rate * (1.1 + 2.0 * u(rng));
  m.holding_rate = 1.0 + 40.0 * u(rng);
  return m;
}

}  // namespace

CheckResult check_milp_oracle(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < instances; ++i) {
    const auto model = random_app_model(rng);
    const auto milp = build_app_model(model);
    const auto bb = solve_milp(milp.problem);
    const auto ex = enumerate_exact(milp.problem);
    if (bb.status != SolveStatus::Optimal || ex.status != SolveStatus::Optimal) {
      ++failures;
      continue;
    }
    const double rel = std::abs(bb.objective - ex.objective) / std::max(1.0, std::abs(ex.objective));
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++failures;
  }
  return {failures == 0, std::to_string(instances) + " instances, " + std::to_string(failures) +
                             " mismatches, worst relative difference " + fmt(worst)};
}

CheckResult check_calibration() {
  bool ok = true;
  std::ostringstream detail;
  double worst_spread = 0.0;
  for (const auto kind : {StructureKind::FlowMany, StructureKind::FlowLow, StructureKind::JobMany}) {
    const auto structure = build_structure(kind);
    std::map<MaterialId, double> average;
    for (const MaterialId p : structure.finished()) {
      double sum = 0.0;
      for (int m = 1; m <= 12; ++m) sum += forecast_value(DemandPattern::Constant, p, m);
      average[p] = sum / 12.0;
    }
    for (const double rho : {2.2, 2.5, 2.8}) {
      const auto times = calibrate_processing_times(structure, average, rho);
      for (const auto& [j, a] : times.per_machine) {
        const double load = a * times.piece_ops.at(j);
        const double spread = std::abs(load - times.target_hours) / times.target_hours;
        worst_spread = std::max(worst_spread, spread);
        if (spread > 1e-9) ok = false;
      }
      if (rho == 2.5 && kind == StructureKind::FlowMany) {
        for (const MachineId j : {5, 6}) {
          if (std::abs(times.per_machine.at(j) - 0.08) > 1e-12) ok = false;
        }
        detail << "flow_many M5/M6 " << times.per_machine.at(5) * 60.0 << " min; ";
      }
      if (rho == 2.5 && kind == StructureKind::FlowLow) {
        for (const auto& [j, a] : times.per_machine) {
          if (std::abs(a - 0.16) > 1e-12) ok = false;
        }
        detail << "flow_low all machines " << times.per_machine.at(1) * 60.0 << " min; ";
      }
    }
  }
  detail << "worst relative load spread " << worst_spread;
  return {ok, detail.str()};
}

CheckResult check_order_rate() {
  const double rate = order_rate(1000.0 + 200.0, 10.0);
  return {rate == 120.0, "order_rate(1200, 10) = " + fmt(rate)};
}

CheckResult check_planning_stack(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> amount(0, 60);
  std::uniform_int_distribution<int> len(1, 40);
  std::uniform_int_distribution<long> level(-30, 200);
  int mps_bad = 0, mrp_bad = 0, idem_bad = 0;

  const auto structure = build_structure(StructureKind::FlowMany);
  MrpParams params = default_mrp_params(structure, DemandPattern::Constant, SeasonalPhase::Prose);

  for (int i = 0; i < instances; ++i) {
    // MPS: cumulative schedule dominates demand and program plus target.
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<long> demand(n), program(n), target(n);
    for (std::size_t k = 0; k < n; ++k) {
      demand[k] = amount(rng);
      program[k] = amount(rng);
      target[k] = std::max(0L, level(rng));
    }
    const auto mps = compute_mps(demand, program, target);
    long cd = 0, cp = 0, cm = 0;
    for (std::size_t k = 0; k < n; ++k) {
      cd += demand[k];
      cp += program[k];
      cm += mps[k];
      if (mps[k] < 0 || cm < cd || cm < cp + target[k]) {
        ++mps_bad;
        break;
      }
    }

    // MRP on random state.
    MrpInput in;
    in.today = 100 + i;
    const auto H = static_cast<std::size_t>(params.mrp_horizon);
    for (const MaterialId p : structure.finished()) {
      std::vector<long> g(H);
      for (auto& x : g) x = amount(rng);
      in.gross[p] = g;
    }
    for (const MaterialId id : structure.planning_order()) {
      in.on_hand[id] = std::max(0L, level(rng));
      std::vector<long> r(H, 0);
      for (auto& x : r) x = amount(rng) < 6 ? amount(rng) : 0;
      in.receipts[id] = r;
    }
    const auto res = schedule_and_explode(structure, params, in);

    // Conservation: planned quantity equals net requirements per material,
    // and projected availability with the planned orders never goes negative.
    for (const MaterialId id : structure.planning_order()) {
      long ordered = 0, net = 0;
      std::vector<long> due(H, 0);
      for (const auto& o : res.orders) {
        if (o.material != id) continue;
        ordered += o.quantity;
        due[static_cast<std::size_t>(o.due - in.today)] += o.quantity;
      }
      for (const long x : res.net.at(id)) net += x;
      long proj = in.on_hand.at(id) - params.safety(id);
      bool negative = false;
      for (std::size_t d = 0; d < H; ++d) {
        proj += in.receipts.at(id)[d] + due[d] - res.gross.at(id)[d];
        if (proj < 0) negative = true;
      }
      if (ordered != net || negative) {
        ++mrp_bad;
        break;
      }
    }

    // Idempotence: the same state gives the same plan, and firming the plan
    // (orders become receipts, their components become gross) leaves
    // nothing more to order.
    const auto again = schedule_and_explode(structure, params, in);
    bool same = again.orders.size() == res.orders.size();
    for (std::size_t k = 0; same && k < res.orders.size(); ++k) {
      const auto& a = res.orders[k];
      const auto& b = again.orders[k];
      same = a.material == b.material && a.quantity == b.quantity && a.start == b.start &&
             a.due == b.due;
    }
    MrpInput firmed = in;
    for (const auto& o : res.orders) {
      auto& r = firmed.receipts[o.material];
      r.resize(H, 0);
      r[static_cast<std::size_t>(o.due - in.today)] += o.quantity;
      for (const auto& line : structure.material(o.material).components) {
        if (structure.material(line.component).kind == MaterialKind::Raw) continue;
        auto& g = firmed.gross[line.component];
        g.resize(H, 0);
        g[static_cast<std::size_t>(o.start - in.today)] += o.quantity * line.quantity;
      }
    }
    if (!same || !schedule_and_explode(structure, params, firmed).orders.empty()) ++idem_bad;
  }
  const bool ok = mps_bad == 0 && mrp_bad == 0 && idem_bad == 0;
  return {ok, std::to_string(instances) + " instances; MPS dominance failures " +
                  std::to_string(mps_bad) + ", MRP conservation failures " +
                  std::to_string(mrp_bad) + ", idempotence failures " + std::to_string(idem_bad)};
}

CheckResult check_simulator(const ScenarioConfig& config) {
  std::ostringstream trace_a, trace_b;
  SimOptions a;
  a.check_invariants = true;
  a.trace = &trace_a;
  SimOptions b = a;
  b.trace = &trace_b;
  try {
    const auto ra = run_replication(config, 0, a);
    const auto rb = run_replication(config, 0, b);
    const std::string row_a = format_row(ra), row_b = format_row(rb);
    const bool rows_equal = row_a == row_b;
    const bool traces_equal = trace_a.str() == trace_b.str();
    std::size_t events = 0;
    for (const char c : trace_a.str()) events += c == '\n';
    return {rows_equal && traces_equal,
            "balances held at all " + std::to_string(events) + " traced events; rows " +
                (rows_equal ? "identical" : "differ") + ", traces " +
                (traces_equal ? "identical" : "differ")};
  } catch (const std::exception& e) {
    return {false, e.what()};
  }
}

CheckResult check_deterministic(const ScenarioConfig& config) {
  ScenarioConfig c = config;
  c.alpha = 0.0;
  c.noise = NoiseMode::Degenerate;
  Simulation sim(c, cell_seed(c, 0));
  const auto k = sim.run();
  const bool ok = k.service_level == 1.0 && k.totals.backorder == 0.0;
  return {ok, "eta " + fmt(c.eta) + ": service level " + fmt(k.service_level) + " (" +
                  std::to_string(k.late_orders) + " of " + std::to_string(k.orders) +
                  " orders late), backorder cost " + fmt(k.totals.backorder)};
}

}  // namespace hps
