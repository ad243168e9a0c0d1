#include "hps/checks.hpp"
#include "hps/experiment.hpp"
#include "hps/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace hps;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

std::vector<double> parse_grid(const std::string& text, const std::vector<double>& full,
                               const char* field) {
  if (text == "full") return full;
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError(field, "not a number: '" + item + "'");
    }
    if (pos != item.size()) throw ConfigError(field, "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(field, "grid is empty");
  return out;
}

// Desk scale unless the file says otherwise; --full selects the study protocol.
ScenarioConfig load_config(const std::string& path, bool full) {
  ScenarioConfig c = load_scenario(path);
  if (full) {
    c.years = 4;
    c.warmup_years = 1;
    c.replications = 10;
  } else {
    if (!c.explicit_keys.count("years")) c.years = 2;
    if (!c.explicit_keys.count("warmup_years")) c.warmup_years = 1;
    if (!c.explicit_keys.count("replications")) c.replications = 3;
  }
  c.validate();
  return c;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

void print_progress(const RunResult& r, std::size_t done, std::size_t total) {
  std::cerr << "[" << done << "/" << total << "] " << r.scenario_id << " alpha=" << r.alpha
            << " eta=" << r.eta << " rep=" << r.rep << " cost/day=" << r.cost.total()
            << " service=" << r.service_level << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical production planning simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  bool full = false;
  app.add_flag("--full", full, "Study protocol: 4 years (1 warmup), 10 replications");

  std::string config_path, out_path, trace_path;
  double eta = -1.0, alpha = -1.0;
  int reps = 0;
  long long seed = -1;
  bool check = false;
  auto* run = app.add_subcommand("run", "Simulate one scenario");
  run->add_option("--config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--eta", eta, "Planned utilization factor");
  run->add_option("--alpha", alpha, "Forecast error parameter");
  run->add_option("--reps", reps, "Replications");
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--out", out_path, "CSV output (default stdout)");
  run->add_option("--trace", trace_path, "Event trace CSV of replication 0");
  run->add_flag("--check", check, "Check material balances after every event");

  std::string eta_grid = "full", alpha_grid = "0";
  int threads = 1;
  std::string svg_path;
  bool all_scenarios = false;
  auto* sweep = app.add_subcommand("sweep", "Enumerate eta and alpha grids");
  sweep->add_option("--config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--eta-grid", eta_grid, "full or a comma list");
  sweep->add_option("--alpha-grid", alpha_grid, "full or a comma list");
  sweep->add_option("--reps", reps, "Replications");
  sweep->add_option("--seed", seed, "Base seed");
  sweep->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_path, "CSV output (default stdout)");
  sweep->add_flag("--all-scenarios", all_scenarios, "All 162 factor combinations");

  std::string in_path, baseline = "f_m_c", report_csv;
  auto* report = app.add_subcommand("report", "Summarize a results CSV");
  report->add_option("--in", in_path, "Results CSV")->required()->check(CLI::ExistingFile);
  report->add_option("--baseline", baseline, "Baseline scenario id");
  report->add_option("--csv", report_csv, "Also write the tables as CSV");
  report->add_option("--svg", svg_path, "Cost and service vs eta chart of the baseline");

  auto* selftest = app.add_subcommand("selftest", "Run oracle and invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (*run) {
      ScenarioConfig c = load_config(config_path, full);
      if (eta >= 0.0) c.eta = eta;
      if (alpha >= 0.0) c.alpha = alpha;
      if (reps > 0) c.replications = reps;
      if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
      c.validate();
      std::ofstream file;
      auto& out = open_out(out_path, file);
      std::ofstream trace;
      std::vector<RunResult> rows;
      for (int rep = 0; rep < c.replications; ++rep) {
        SimOptions o;
        o.check_invariants = check;
        if (rep == 0 && !trace_path.empty()) {
          trace.open(trace_path);
          if (!trace) throw std::runtime_error("cannot write " + trace_path);
          o.trace = &trace;
        }
        rows.push_back(run_replication(c, rep, o));
        print_progress(rows.back(), rows.size(), static_cast<std::size_t>(c.replications));
      }
      write_results_csv(out, rows);
      return kOk;
    }

    if (*sweep) {
      ExperimentPlan plan;
      plan.base = load_config(config_path, full);
      if (seed >= 0) plan.base.seed = static_cast<std::uint64_t>(seed);
      plan.scenarios = all_scenarios ? full_factor_grid()
                                     : std::vector<ScenarioFactors>{ScenarioFactors::of(plan.base)};
      plan.etas = parse_grid(eta_grid, hps::eta_grid(), "eta_grid");
      plan.alphas = parse_grid(alpha_grid, hps::alpha_grid(), "alpha_grid");
      plan.replications = reps > 0 ? reps : plan.base.replications;
      plan.validate();
      SweepOptions so;
      so.threads = threads;
      so.progress = print_progress;
      const auto result = sweep_grid(plan, so);
      std::ofstream file;
      write_results_csv(open_out(out_path, file), result.rows);
      for (const auto& f : result.failures) {
        std::cerr << "failed: " << f.scenario_id << " alpha=" << f.alpha << " eta=" << f.eta
                  << " rep=" << f.rep << ": " << f.message << "\n";
      }
      return result.failures.empty() ? kOk : kRuntime;
    }

    if (*report) {
      std::ifstream in(in_path);
      const auto rows = read_results_csv(in);
      const auto rep = emit_report(rows, baseline);
      write_report_text(std::cout, rep);
      if (!report_csv.empty()) {
        std::ofstream f(report_csv);
        if (!f) throw std::runtime_error("cannot write " + report_csv);
        write_report_csv(f, rep);
      }
      if (!svg_path.empty()) {
        std::vector<RunResult> base;
        for (const auto& r : rows) {
          if (r.scenario_id == baseline) base.push_back(r);
        }
        std::ofstream f(svg_path);
        if (!f) throw std::runtime_error("cannot write " + svg_path);
        write_eta_svg(f, base, baseline);
      }
      return kOk;
    }

    if (*selftest) {
      ScenarioConfig sim;
      sim.years = 2;
      sim.warmup_years = 1;
      sim.eta = 0.9;
      const std::vector<std::pair<std::string, CheckResult (*)()>> checks = {
          {"milp oracle", [] { return check_milp_oracle(); }},
          {"calibration", [] { return check_calibration(); }},
          {"order rate", [] { return check_order_rate(); }},
          {"planning stack", [] { return check_planning_stack(); }},
      };
      bool ok = true;
      for (const auto& [name, fn] : checks) {
        const auto r = fn();
        ok = ok && r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << "\n";
      }
      const auto r = check_simulator(sim);
      ok = ok && r.pass;
      std::cout << (r.pass ? "PASS " : "FAIL ") << "simulator: " << r.detail << "\n";
      return ok ? kOk : kRuntime;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
