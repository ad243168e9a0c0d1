#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hps {

using MaterialId = int;
using MachineId = int;  // 1..6

enum class MaterialKind { Finished, Sub, Raw };

struct BomLine {
  MaterialId component = 0;
  int quantity = 1;
};

struct Material {
  MaterialId id = 0;
  MaterialKind kind = MaterialKind::Raw;
  std::vector<BomLine> components;
  std::vector<MachineId> routing;  // operations in order
};

/// Shift plans: index 0 is the 10-shift week, index 1 the 15-shift week.
inline constexpr int kShiftPlans = 2;

/// Day-level calendar. A month is 4 weeks of 7 calendar days; Monday to
/// Friday are working days; 10 shifts per week run 16 h per working day,
/// 15 shifts run 24 h.
struct Calendar {
  int calendar_days_per_month = 28;
  int working_days_per_month = 20;
  int months_per_year = 12;
  std::array<double, kShiftPlans> shift_hours_per_day{16.0, 24.0};

  [[nodiscard]] double capacity(int shift_plan) const {
    return working_days_per_month * shift_hours_per_day.at(static_cast<std::size_t>(shift_plan));
  }
  [[nodiscard]] int days_per_year() const { return calendar_days_per_month * months_per_year; }
  /// Zero-based absolute month index of a (possibly fractional) day.
  [[nodiscard]] int month_of(double day) const;
  [[nodiscard]] static bool is_working_day(long day) {
    const long dow = ((day % 7) + 7) % 7;
    return dow < 5;
  }
  /// Working-day ordinal (0..19) inside the month, or -1 on weekends.
  [[nodiscard]] int working_day_index(long day) const;
};

struct Machine {
  MachineId id = 0;
  std::array<double, kShiftPlans> capacity{320.0, 480.0};  // hours per month
};

enum class StructureKind { FlowMany, FlowLow, JobMany };
enum class DemandPattern { Constant, Seasonal };
enum class CostLevel { Low, Med, High };
enum class SeasonalPhase { Prose, Table };
enum class NoiseMode { Stochastic, Degenerate };
enum class BackorderMode { PerPiece, PerOrder };
enum class OffloadPolicyKind { Slack, Load };

struct CostRates {
  double internal = 100.0;          // per machine hour
  double external = 200.0;          // per machine hour
  double holding_finished = 1.0;    // per piece per day
  double holding_sub = 0.5;         // per piece per day
  double backorder = 19.0;          // per piece (or order) per day
  int days_per_month = 28;

  [[nodiscard]] double holding(MaterialKind kind) const {
    switch (kind) {
      case MaterialKind::Finished: return holding_finished;
      case MaterialKind::Sub: return holding_sub;
      case MaterialKind::Raw: return 0.0;
    }
    return 0.0;
  }
  /// Monthly finished-goods holding rate used inside the aggregate plan.
  [[nodiscard]] double holding_monthly() const { return days_per_month * holding_finished; }

  void validate() const;
};

[[nodiscard]] CostRates cost_rates(CostLevel capacity, CostLevel backorder);

/// Materials, machines and derived lookups for one shop preset.
class ProductionStructure {
 public:
  ProductionStructure(StructureKind kind, std::vector<Material> materials,
                      std::vector<Machine> machines);

  [[nodiscard]] StructureKind kind() const { return kind_; }
  [[nodiscard]] const std::vector<Material>& materials() const { return materials_; }
  [[nodiscard]] const std::vector<Machine>& machines() const { return machines_; }
  [[nodiscard]] const Material& material(MaterialId id) const;
  [[nodiscard]] bool has_material(MaterialId id) const { return index_.count(id) != 0; }
  [[nodiscard]] std::vector<MaterialId> finished() const;
  /// Non-raw materials ordered so every parent precedes its components.
  [[nodiscard]] const std::vector<MaterialId>& planning_order() const { return order_; }
  /// Direct parents (material, quantity) of a component.
  [[nodiscard]] std::vector<std::pair<MaterialId, int>> parents(MaterialId id) const;
  /// Longest BOM chain (finished = level 0) down to a raw material.
  [[nodiscard]] int depth(MaterialId id) const;

 private:
  StructureKind kind_;
  std::vector<Material> materials_;
  std::vector<Machine> machines_;
  std::map<MaterialId, std::size_t> index_;
  std::vector<MaterialId> order_;
};

[[nodiscard]] ProductionStructure build_structure(StructureKind kind);

/// Per-operation processing hours calibrated to a target machine load.
struct ProcessingTimes {
  std::map<MachineId, double> per_machine;  // uniform hours per piece-op
  std::map<MachineId, double> piece_ops;    // monthly piece-operations
  double target_hours = 0.0;

  /// Hours of the `op`-th routing operation of a material.
  [[nodiscard]] double operation_hours(const Material& m, std::size_t op) const {
    return per_machine.at(m.routing.at(op));
  }
};

/// Explodes average monthly finished demand through the BOM and sets a
/// uniform per-machine time so every machine carries rho * 160 hours.
/// Throws std::invalid_argument if a machine sees no piece-operations.
[[nodiscard]] ProcessingTimes calibrate_processing_times(
    const ProductionStructure& structure,
    const std::map<MaterialId, double>& monthly_forecast, double rho);

/// Monthly gross pieces per material implied by finished demand.
[[nodiscard]] std::map<MaterialId, double> explode_demand(
    const ProductionStructure& structure,
    const std::map<MaterialId, double>& finished_demand);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ScenarioConfig {
  StructureKind structure = StructureKind::FlowMany;
  DemandPattern pattern = DemandPattern::Constant;
  double rho = 2.5;
  CostLevel capacity_cost = CostLevel::Med;
  CostLevel backorder_cost = CostLevel::Med;
  double alpha = 0.0;
  double eta = 0.9;
  int years = 4;
  int warmup_years = 1;
  int replications = 10;
  std::uint64_t seed = 1;

  // Switches beyond the core factors.
  SeasonalPhase seasonal_phase = SeasonalPhase::Prose;
  NoiseMode noise = NoiseMode::Stochastic;
  BackorderMode backorder_mode = BackorderMode::PerPiece;
  OffloadPolicyKind offload = OffloadPolicyKind::Load;
  double sub_safety_stock = 0.0;  // pieces, for non-finished materials
  double mip_gap = 1e-4;          // relative gap for the planning MILP
  double plan_holding_days = 28.0;  // finished holding rate multiplier in the plan objective

  std::set<std::string> explicit_keys;  // keys present in the source file

  [[nodiscard]] CostRates rates() const { return cost_rates(capacity_cost, backorder_cost); }
  /// Structure/pattern code such as "f_m_c".
  [[nodiscard]] std::string scenario_id() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

[[nodiscard]] ScenarioConfig parse_scenario(std::string_view json_text);
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& path);
[[nodiscard]] std::string to_json(const ScenarioConfig& config);

[[nodiscard]] std::string_view to_string(StructureKind k);
[[nodiscard]] std::string_view to_string(DemandPattern p);
[[nodiscard]] std::string_view to_string(CostLevel c);
[[nodiscard]] StructureKind parse_structure(std::string_view s);
[[nodiscard]] DemandPattern parse_pattern(std::string_view s);
[[nodiscard]] CostLevel parse_cost_level(std::string_view s);

/// Planned utilization grid 0.5 + 0.02 q, q = 0..25.
[[nodiscard]] std::vector<double> eta_grid();
/// Forecast error grid 0.05 k, k = 0..10.
[[nodiscard]] std::vector<double> alpha_grid();

}  // namespace hps
