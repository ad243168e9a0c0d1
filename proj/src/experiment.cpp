#include "hps/experiment.hpp"

#include "hps/demand.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace hps {

namespace {

constexpr const char* kCsvHeader =
    "scenario_id,structure,pattern,rho,cap_cost_level,bo_cost_level,alpha,eta,rep,seed,"
    "cost_total,cost_internal,cost_external,cost_holding,cost_backorder,service_level,"
    "util_M1,util_M2,util_M3,util_M4,util_M5,util_M6";

std::string num(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::int64_t milli(double v) { return std::llround(v * 1000.0); }

auto factor_key(const ScenarioFactors& f) {
  return std::make_tuple(static_cast<int>(f.structure), static_cast<int>(f.pattern), milli(f.rho),
                         static_cast<int>(f.capacity_cost), static_cast<int>(f.backorder_cost));
}

auto row_key(const RunResult& r) {
  return std::tuple_cat(factor_key(ScenarioFactors{r.structure, r.pattern, r.rho, r.capacity_cost,
                                                   r.backorder_cost}),
                        std::make_tuple(milli(r.alpha), milli(r.eta), r.rep));
}

std::string scenario_code(StructureKind s, DemandPattern p) {
  ScenarioConfig c;
  c.structure = s;
  c.pattern = p;
  return c.scenario_id();
}

std::string rho_label(double rho) { return num(rho, 3); }

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double percent(double value, double base) {
  return base == 0.0 ? 0.0 : (value - base) / base * 100.0;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, const char* field) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(field, "not a number: '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError(field, "not a number: '" + s + "'");
  return v;
}

}  // namespace

std::uint64_t cell_seed(const ScenarioConfig& config, int rep) {
  std::uint64_t h = splitmix64(config.seed);
  const auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ splitmix64(v)); };
  mix(static_cast<std::uint64_t>(config.structure));
  mix(static_cast<std::uint64_t>(config.pattern));
  mix(static_cast<std::uint64_t>(milli(config.rho)));
  mix(static_cast<std::uint64_t>(config.capacity_cost));
  mix(static_cast<std::uint64_t>(config.backorder_cost));
  mix(static_cast<std::uint64_t>(rep));
  return h;
}

RunResult run_replication(const ScenarioConfig& config, int rep, const SimOptions& options,
                          SimObserver* observer) {
  config.validate();
  RunResult r;
  r.scenario_id = config.scenario_id();
  r.structure = config.structure;
  r.pattern = config.pattern;
  r.rho = config.rho;
  r.capacity_cost = config.capacity_cost;
  r.backorder_cost = config.backorder_cost;
  r.alpha = config.alpha;
  r.eta = config.eta;
  r.rep = rep;
  r.seed = cell_seed(config, rep);
  try {
    Simulation sim(config, r.seed, options, observer);
    const KpiReport k = sim.run();
    r.cost = k.per_day();
    r.service_level = k.service_level;
    for (const auto& [id, u] : k.utilization) {
      if (id >= 1 && id <= 6) r.utilization[static_cast<std::size_t>(id - 1)] = u;
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(r.scenario_id + " rho=" + num(r.rho) + " alpha=" + num(r.alpha) +
                             " eta=" + num(r.eta) + " rep=" + std::to_string(rep) + ": " + e.what());
  }
  return r;
}

void ScenarioFactors::apply(ScenarioConfig& config) const {
  config.structure = structure;
  config.pattern = pattern;
  config.rho = rho;
  config.capacity_cost = capacity_cost;
  config.backorder_cost = backorder_cost;
}

ScenarioFactors ScenarioFactors::of(const ScenarioConfig& config) {
  return {config.structure, config.pattern, config.rho, config.capacity_cost, config.backorder_cost};
}

std::vector<ScenarioFactors> full_factor_grid() {
  std::vector<ScenarioFactors> out;
  for (const auto s : {StructureKind::FlowMany, StructureKind::FlowLow, StructureKind::JobMany}) {
    for (const auto p : {DemandPattern::Constant, DemandPattern::Seasonal}) {
      for (const double rho : {2.2, 2.5, 2.8}) {
        for (const auto ci : {CostLevel::Low, CostLevel::Med, CostLevel::High}) {
          for (const auto cb : {CostLevel::Low, CostLevel::Med, CostLevel::High}) {
            out.push_back({s, p, rho, ci, cb});
          }
        }
      }
    }
  }
  return out;
}

void ExperimentPlan::validate() const {
  if (scenarios.empty()) throw ConfigError("scenarios", "grid is empty");
  if (alphas.empty()) throw ConfigError("alpha_grid", "grid is empty");
  if (etas.empty()) throw ConfigError("eta_grid", "grid is empty");
  if (replications < 1) throw ConfigError("replications", "must be at least 1");
  for (const auto& f : scenarios) {
    ScenarioConfig c = base;
    f.apply(c);
    for (const double a : alphas) {
      c.alpha = a;
      for (const double e : etas) {
        c.eta = e;
        c.validate();
      }
    }
  }
}

bool primary_key_less(const RunResult& a, const RunResult& b) { return row_key(a) < row_key(b); }

SweepResult sweep_grid(const ExperimentPlan& plan, const SweepOptions& options) {
  plan.validate();
  struct Cell {
    ScenarioConfig config;
    int rep;
  };
  std::vector<Cell> cells;
  cells.reserve(plan.cells());
  for (const auto& f : plan.scenarios) {
    for (const double a : plan.alphas) {
      for (const double e : plan.etas) {
        for (int rep = 0; rep < plan.replications; ++rep) {
          ScenarioConfig c = plan.base;
          f.apply(c);
          c.alpha = a;
          c.eta = e;
          cells.push_back({c, rep});
        }
      }
    }
  }

  std::vector<std::optional<RunResult>> slots(cells.size());
  std::vector<std::optional<CellFailure>> failed(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::size_t done = 0;

  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto& cell = cells[i];
      try {
        slots[i] = run_replication(cell.config, cell.rep, options.sim, options.observer);
      } catch (const std::exception& e) {
        failed[i] = CellFailure{cell.config.scenario_id(), cell.config.alpha, cell.config.eta,
                                cell.rep, e.what()};
      }
      std::lock_guard<std::mutex> lock(progress_mutex);
      ++done;
      if (options.progress && slots[i]) options.progress(*slots[i], done, cells.size());
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (slots[i]) out.rows.push_back(std::move(*slots[i]));
    if (failed[i]) out.failures.push_back(std::move(*failed[i]));
  }
  std::sort(out.rows.begin(), out.rows.end(), primary_key_less);
  return out;
}

std::vector<EtaMean> mean_by_eta(const std::vector<RunResult>& rows) {
  std::map<std::int64_t, EtaMean> by;
  for (const auto& r : rows) {
    auto& m = by[milli(r.eta)];
    m.eta = r.eta;
    m.cost += r.cost.total();
    m.service += r.service_level;
    ++m.runs;
  }
  std::vector<EtaMean> out;
  for (auto& [k, m] : by) {
    m.cost /= m.runs;
    m.service /= m.runs;
    out.push_back(m);
  }
  return out;
}

OptimalEta select_optimal_eta(const std::vector<RunResult>& rows) {
  if (rows.empty()) throw std::invalid_argument("select_optimal_eta: no rows");
  const auto f0 = factor_key(ScenarioFactors{rows[0].structure, rows[0].pattern, rows[0].rho,
                                             rows[0].capacity_cost, rows[0].backorder_cost});
  for (const auto& r : rows) {
    const auto f = factor_key(
        ScenarioFactors{r.structure, r.pattern, r.rho, r.capacity_cost, r.backorder_cost});
    if (f != f0 || milli(r.alpha) != milli(rows[0].alpha)) {
      throw std::invalid_argument("select_optimal_eta: rows mix scenarios or alphas");
    }
  }
  OptimalEta best;
  bool have = false;
  for (const auto& m : mean_by_eta(rows)) {  // ascending eta, strict < keeps the lower on ties
    if (!have || m.cost < best.cost) {
      best = {m.eta, m.cost, m.service};
      have = true;
    }
  }
  return best;
}

RegressionResult regress_alpha(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("regress_alpha: needs at least 3 points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  const double x0 = points.front().first;
  const bool spread = std::any_of(points.begin(), points.end(),
                                  [&](const auto& p) { return std::abs(p.first - x0) > 1e-12; });
  if (!spread) throw std::invalid_argument("regress_alpha: alpha has zero variance");
  RegressionResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  if (syy <= 1e-24 * std::max(1.0, my * my) * n) {
    r.slope = 0.0;
    r.intercept = my;
    r.r = 0.0;
    r.r_defined = false;
  } else {
    r.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  }
  r.percent_change = percent(r.intercept + 0.5 * r.slope, r.intercept);
  return r;
}

std::vector<CellOptimum> optimal_cells(const std::vector<RunResult>& rows) {
  std::map<decltype(std::tuple_cat(factor_key({}), std::make_tuple(std::int64_t{}))),
           std::vector<RunResult>>
      groups;
  for (const auto& r : rows) {
    const ScenarioFactors f{r.structure, r.pattern, r.rho, r.capacity_cost, r.backorder_cost};
    groups[std::tuple_cat(factor_key(f), std::make_tuple(milli(r.alpha)))].push_back(r);
  }
  std::vector<CellOptimum> out;
  for (const auto& [k, g] : groups) {
    const auto& r = g.front();
    CellOptimum c;
    c.factors = {r.structure, r.pattern, r.rho, r.capacity_cost, r.backorder_cost};
    c.scenario_id = scenario_code(r.structure, r.pattern);
    c.alpha = r.alpha;
    c.best = select_optimal_eta(g);
    out.push_back(c);
  }
  return out;
}

Report emit_report(const std::vector<RunResult>& rows, const std::string& baseline) {
  const auto cells = optimal_cells(rows);
  Report rep;
  rep.baseline = baseline;

  // Mean over rho and cost levels per (scenario id, alpha).
  std::map<std::pair<std::int64_t, std::string>, std::pair<std::vector<double>, std::vector<double>>> agg;
  std::set<std::int64_t> alphas;
  for (const auto& c : cells) {
    auto& a = agg[{milli(c.alpha), c.scenario_id}];
    a.first.push_back(c.best.eta);
    a.second.push_back(c.best.cost);
    alphas.insert(milli(c.alpha));
  }
  for (const auto a : alphas) {
    const auto base = agg.find({a, baseline});
    if (base == agg.end()) {
      throw std::invalid_argument("baseline '" + baseline + "' missing at alpha " +
                                  num(static_cast<double>(a) / 1000.0));
    }
    const double be = mean(base->second.first);
    const double bc = mean(base->second.second);
    for (const auto& [k, v] : agg) {
      if (k.first != a) continue;
      ScenarioSummary s;
      s.scenario_id = k.second;
      s.alpha = static_cast<double>(a) / 1000.0;
      s.eta = mean(v.first);
      s.cost = mean(v.second);
      s.eta_delta = percent(s.eta, be);
      s.cost_delta = percent(s.cost, bc);
      rep.summaries.push_back(s);
    }
  }
  // Baseline first within each alpha, others alphabetical.
  std::stable_sort(rep.summaries.begin(), rep.summaries.end(), [&](const auto& x, const auto& y) {
    if (milli(x.alpha) != milli(y.alpha)) return milli(x.alpha) < milli(y.alpha);
    const bool bx = x.scenario_id == baseline, by = y.scenario_id == baseline;
    if (bx != by) return bx;
    return x.scenario_id < y.scenario_id;
  });

  // Means grouped by one factor level at a time.
  struct Acc {
    std::vector<double> eta, cost;
  };
  std::map<std::tuple<std::string, std::string, std::string, std::int64_t>, Acc> sens;
  for (const auto& c : cells) {
    const auto add = [&](const std::string& factor, const std::string& level) {
      auto& acc = sens[{c.scenario_id, factor, level, milli(c.alpha)}];
      acc.eta.push_back(c.best.eta);
      acc.cost.push_back(c.best.cost);
    };
    add("rho", rho_label(c.factors.rho));
    add("capacity_cost", std::string(to_string(c.factors.capacity_cost)));
    add("backorder_cost", std::string(to_string(c.factors.backorder_cost)));
  }
  for (const auto& [k, acc] : sens) {
    SensitivityRow s;
    std::tie(s.scenario_id, s.factor, s.level, std::ignore) = k;
    s.alpha = static_cast<double>(std::get<3>(k)) / 1000.0;
    s.eta = mean(acc.eta);
    s.cost = mean(acc.cost);
    s.cells = static_cast<int>(acc.eta.size());
    rep.sensitivity.push_back(s);
  }

  // One regression per scenario id over all optimal cells.
  std::map<std::string, std::vector<const CellOptimum*>> by_id;
  for (const auto& c : cells) by_id[c.scenario_id].push_back(&c);
  for (const auto& [id, list] : by_id) {
    std::set<std::int64_t> distinct;
    for (const auto* c : list) distinct.insert(milli(c->alpha));
    if (distinct.size() < 3) continue;
    std::vector<std::pair<double, double>> eta_pts, cost_pts;
    for (const auto* c : list) {
      eta_pts.emplace_back(c->alpha, c->best.eta);
      cost_pts.emplace_back(c->alpha, c->best.cost);
    }
    const int n = static_cast<int>(list.size());
    rep.regressions.push_back({id, "eta", regress_alpha(eta_pts), n});
    rep.regressions.push_back({id, "cost", regress_alpha(cost_pts), n});
  }
  return rep;
}

void write_report_text(std::ostream& out, const Report& report) {
  const auto flags = out.flags();
  out << std::fixed;
  out << "Optimal planned utilization and cost per day (delta vs " << report.baseline << ")\n";
  out << std::left << std::setw(8) << "alpha" << std::setw(10) << "scenario" << std::right
      << std::setw(8) << "eta*" << std::setw(10) << "d_eta%" << std::setw(12) << "cost"
      << std::setw(10) << "d_cost%" << "\n";
  for (const auto& s : report.summaries) {
    out << std::left << std::setw(8) << std::setprecision(2) << s.alpha << std::setw(10)
        << s.scenario_id << std::right << std::setw(8) << s.eta << std::setw(10) << s.eta_delta
        << std::setw(12) << std::setprecision(1) << s.cost << std::setw(10) << std::setprecision(2)
        << s.cost_delta << "\n";
  }
  if (!report.sensitivity.empty()) {
    out << "\nSensitivity (mean optimum per factor level)\n";
    out << std::left << std::setw(10) << "scenario" << std::setw(16) << "factor" << std::setw(8)
        << "level" << std::setw(8) << "alpha" << std::right << std::setw(8) << "eta*"
        << std::setw(12) << "cost" << std::setw(7) << "n" << "\n";
    for (const auto& s : report.sensitivity) {
      out << std::left << std::setw(10) << s.scenario_id << std::setw(16) << s.factor
          << std::setw(8) << s.level << std::setw(8) << std::setprecision(2) << s.alpha
          << std::right << std::setw(8) << s.eta << std::setw(12) << std::setprecision(1) << s.cost
          << std::setw(7) << s.cells << "\n";
    }
  }
  if (!report.regressions.empty()) {
    out << "\nRegression on alpha\n";
    out << std::left << std::setw(10) << "scenario" << std::setw(8) << "target" << std::right
        << std::setw(12) << "slope" << std::setw(12) << "intercept" << std::setw(8) << "R"
        << std::setw(10) << "change%" << std::setw(7) << "n" << "\n";
    for (const auto& r : report.regressions) {
      out << std::left << std::setw(10) << r.scenario_id << std::setw(8) << r.target << std::right
          << std::setw(12) << std::setprecision(4) << r.fit.slope << std::setw(12)
          << r.fit.intercept << std::setw(8) << std::setprecision(3) << r.fit.r
          << (r.fit.r_defined ? " " : "*") << std::setw(9) << std::setprecision(2)
          << r.fit.percent_change << std::setw(7) << r.points << "\n";
    }
    out << "(* R undefined for constant values, reported as 0)\n";
  }
  out.flags(flags);
}

void write_report_csv(std::ostream& out, const Report& report) {
  out << "table,scenario_id,factor,level,alpha,eta,cost,eta_delta_pct,cost_delta_pct,slope,"
         "intercept,r,r_defined,percent_change,n\n";
  for (const auto& s : report.summaries) {
    out << "optimum," << s.scenario_id << ",,," << num(s.alpha) << ',' << num(s.eta) << ','
        << num(s.cost) << ',' << num(s.eta_delta) << ',' << num(s.cost_delta) << ",,,,,,\n";
  }
  for (const auto& s : report.sensitivity) {
    out << "sensitivity," << s.scenario_id << ',' << s.factor << ',' << s.level << ','
        << num(s.alpha) << ',' << num(s.eta) << ',' << num(s.cost) << ",,,,,,,," << s.cells
        << "\n";
  }
  for (const auto& r : report.regressions) {
    out << "regression," << r.scenario_id << ',' << r.target << ",,,,,,," << num(r.fit.slope)
        << ',' << num(r.fit.intercept) << ',' << num(r.fit.r) << ','
        << (r.fit.r_defined ? 1 : 0) << ',' << num(r.fit.percent_change) << ',' << r.points
        << "\n";
  }
}

void write_eta_svg(std::ostream& out, const std::vector<RunResult>& rows, const std::string& title) {
  constexpr double W = 640, H = 400, L = 70, R = 60, T = 40, B = 50;
  std::map<std::int64_t, std::vector<RunResult>> by_alpha;
  for (const auto& r : rows) by_alpha[milli(r.alpha)].push_back(r);
  double emin = 1.0, emax = 0.5, cmax = 0.0;
  for (const auto& r : rows) {
    emin = std::min(emin, r.eta);
    emax = std::max(emax, r.eta);
    cmax = std::max(cmax, r.cost.total());
  }
  if (emax <= emin) emax = emin + 0.1;
  if (cmax <= 0.0) cmax = 1.0;
  const auto px = [&](double eta) { return L + (eta - emin) / (emax - emin) * (W - L - R); };
  const auto py_cost = [&](double c) { return H - B - c / cmax * (H - T - B); };
  const auto py_sl = [&](double s) { return H - B - s * (H - T - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << W - R << "\" y1=\"" << T << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double eta = emin + (emax - emin) * i / 5.0;
    out << "<text x=\"" << px(eta) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
        << num(eta, 3) << "</text>\n";
    const double c = cmax * i / 5.0;
    out << "<text x=\"" << L - 6 << "\" y=\"" << py_cost(c) + 4 << "\" text-anchor=\"end\">"
        << num(std::round(c), 6) << "</text>\n";
    out << "<text x=\"" << W - R + 6 << "\" y=\"" << py_sl(i / 5.0) + 4 << "\">" << num(i / 5.0, 2)
        << "</text>\n";
  }
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\">planned utilization</text>\n";
  out << "<text x=\"14\" y=\"" << H / 2 << "\" transform=\"rotate(-90 14 " << H / 2
      << ")\" text-anchor=\"middle\">cost per day (solid)</text>\n";
  out << "<text x=\"" << W - 12 << "\" y=\"" << H / 2 << "\" transform=\"rotate(90 " << W - 12
      << ' ' << H / 2 << ")\" text-anchor=\"middle\">service level (dashed)</text>\n";
  static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::size_t k = 0;
  for (const auto& [a, list] : by_alpha) {
    const char* color = colors[k % std::size(colors)];
    const auto means = mean_by_eta(list);
    std::ostringstream cost, sl;
    for (const auto& m : means) {
      cost << px(m.eta) << ',' << py_cost(m.cost) << ' ';
      sl << px(m.eta) << ',' << py_sl(m.service) << ' ';
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"" << cost.str() << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-dasharray=\"4 3\" points=\""
        << sl.str() << "\"/>\n";
    out << "<text x=\"" << L + 8 << "\" y=\"" << T + 14 * static_cast<double>(k + 1) << "\" fill=\""
        << color << "\">alpha " << num(static_cast<double>(a) / 1000.0, 3) << "</text>\n";
    ++k;
  }
  out << "</svg>\n";
}

std::string format_row(const RunResult& r) {
  std::ostringstream o;
  o << r.scenario_id << ',' << to_string(r.structure) << ',' << to_string(r.pattern) << ','
    << num(r.rho) << ',' << to_string(r.capacity_cost) << ',' << to_string(r.backorder_cost) << ','
    << num(r.alpha) << ',' << num(r.eta) << ',' << r.rep << ',' << r.seed << ','
    << num(r.cost.total()) << ',' << num(r.cost.internal) << ',' << num(r.cost.external) << ','
    << num(r.cost.holding) << ',' << num(r.cost.backorder) << ',' << num(r.service_level);
  for (const double u : r.utilization) o << ',' << num(u);
  return o.str();
}

void write_results_csv(std::ostream& out, const std::vector<RunResult>& rows) {
  out << kCsvHeader << "\n";
  for (const auto& r : rows) out << format_row(r) << "\n";
}

std::vector<RunResult> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv", "empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ConfigError("csv", "unexpected header");
  std::vector<RunResult> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 22) {
      throw ConfigError("csv", "line " + std::to_string(lineno) + ": expected 22 fields");
    }
    RunResult r;
    try {
      r.scenario_id = f[0];
      r.structure = parse_structure(f[1]);
      r.pattern = parse_pattern(f[2]);
      r.rho = to_double(f[3], "rho");
      r.capacity_cost = parse_cost_level(f[4]);
      r.backorder_cost = parse_cost_level(f[5]);
      r.alpha = to_double(f[6], "alpha");
      r.eta = to_double(f[7], "eta");
      r.rep = static_cast<int>(to_double(f[8], "rep"));
      r.seed = std::stoull(f[9]);
      r.cost.internal = to_double(f[11], "cost_internal");
      r.cost.external = to_double(f[12], "cost_external");
      r.cost.holding = to_double(f[13], "cost_holding");
      r.cost.backorder = to_double(f[14], "cost_backorder");
      r.service_level = to_double(f[15], "service_level");
      for (std::size_t j = 0; j < 6; ++j) r.utilization[j] = to_double(f[16 + j], "util");
    } catch (const ConfigError& e) {
      throw ConfigError("csv", "line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError("csv", "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (r.scenario_id != scenario_code(r.structure, r.pattern)) {
      throw ConfigError("csv", "line " + std::to_string(lineno) + ": scenario_id mismatch");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace hps
