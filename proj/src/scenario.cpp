#include "hps/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace hps {

int Calendar::month_of(double day) const {
  return static_cast<int>(std::floor(day / calendar_days_per_month));
}

int Calendar::working_day_index(long day) const {
  if (!is_working_day(day)) return -1;
  const long in_month = ((day % calendar_days_per_month) + calendar_days_per_month) %
                        calendar_days_per_month;
  return static_cast<int>((in_month / 7) * 5 + (in_month % 7));
}

void CostRates::validate() const {
  if (internal < 0 || external < 0 || holding_finished < 0 || holding_sub < 0 ||
      backorder < 0) {
    throw std::invalid_argument("CostRates: rates must be non-negative");
  }
  if (!(internal < external)) {
    throw std::invalid_argument("CostRates: internal rate must be below external rate");
  }
}

CostRates cost_rates(CostLevel capacity, CostLevel backorder) {
  CostRates r;
  switch (capacity) {
    case CostLevel::Low: r.internal = 50; r.external = 100; break;
    case CostLevel::Med: r.internal = 100; r.external = 200; break;
    case CostLevel::High: r.internal = 200; r.external = 400; break;
  }
  switch (backorder) {
    case CostLevel::Low: r.backorder = 9; break;
    case CostLevel::Med: r.backorder = 19; break;
    case CostLevel::High: r.backorder = 99; break;
  }
  return r;
}

ProductionStructure::ProductionStructure(StructureKind kind,
                                         std::vector<Material> materials,
                                         std::vector<Machine> machines)
    : kind_(kind), materials_(std::move(materials)), machines_(std::move(machines)) {
  for (std::size_t i = 0; i < materials_.size(); ++i) {
    if (!index_.emplace(materials_[i].id, i).second) {
      throw std::invalid_argument("duplicate material " + std::to_string(materials_[i].id));
    }
  }
  for (const auto& m : materials_) {
    if (m.kind == MaterialKind::Raw && (!m.routing.empty() || !m.components.empty())) {
      throw std::invalid_argument("raw material " + std::to_string(m.id) +
                                  " must have no routing or components");
    }
    if (m.kind != MaterialKind::Raw && m.routing.empty()) {
      throw std::invalid_argument("material " + std::to_string(m.id) + " has no routing");
    }
    for (const auto& c : m.components) {
      if (!has_material(c.component)) {
        throw std::invalid_argument("unknown component " + std::to_string(c.component));
      }
    }
  }
  // Topological order by DFS; detects cycles.
  std::map<MaterialId, int> mark;
  std::vector<MaterialId> post;
  std::function<void(MaterialId)> visit = [&](MaterialId id) {
    auto& state = mark[id];
    if (state == 2) return;
    if (state == 1) throw std::invalid_argument("BOM cycle through " + std::to_string(id));
    state = 1;
    for (const auto& c : material(id).components) visit(c.component);
    state = 2;
    post.push_back(id);
  };
  for (const auto& m : materials_) visit(m.id);
  std::reverse(post.begin(), post.end());
  for (auto id : post) {
    if (material(id).kind != MaterialKind::Raw) order_.push_back(id);
  }
}

const Material& ProductionStructure::material(MaterialId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown material " + std::to_string(id));
  return materials_[it->second];
}

std::vector<MaterialId> ProductionStructure::finished() const {
  std::vector<MaterialId> out;
  for (const auto& m : materials_) {
    if (m.kind == MaterialKind::Finished) out.push_back(m.id);
  }
  return out;
}

std::vector<std::pair<MaterialId, int>> ProductionStructure::parents(MaterialId id) const {
  std::vector<std::pair<MaterialId, int>> out;
  for (const auto& m : materials_) {
    for (const auto& c : m.components) {
      if (c.component == id) out.emplace_back(m.id, c.quantity);
    }
  }
  return out;
}

int ProductionStructure::depth(MaterialId id) const {
  const auto& m = material(id);
  int d = 0;
  for (const auto& c : m.components) d = std::max(d, 1 + depth(c.component));
  return d;
}

namespace {

struct Row {
  MaterialId id;
  std::vector<MachineId> routing;
  MaterialId component;
};

ProductionStructure assemble(StructureKind kind, const std::vector<Row>& rows,
                             const std::vector<MaterialId>& raws) {
  std::vector<Material> mats;
  for (const auto& r : rows) {
    Material m;
    m.id = r.id;
    m.kind = r.id < 20 ? MaterialKind::Finished : MaterialKind::Sub;
    m.routing = r.routing;
    m.components.push_back(BomLine{r.component, 1});
    mats.push_back(std::move(m));
  }
  for (auto id : raws) {
    Material m;
    m.id = id;
    m.kind = MaterialKind::Raw;
    mats.push_back(std::move(m));
  }
  std::vector<Machine> machines;
  for (MachineId j = 1; j <= 6; ++j) machines.push_back(Machine{j, {320.0, 480.0}});
  return ProductionStructure(kind, std::move(mats), std::move(machines));
}

}  // namespace

ProductionStructure build_structure(StructureKind kind) {
  const std::vector<MaterialId> raws{100, 110, 120, 130};
  switch (kind) {
    case StructureKind::FlowMany:
      return assemble(kind,
                      {{10, {5}, 20}, {11, {5}, 20}, {12, {6}, 21}, {13, {6}, 21},
                       {14, {5}, 22}, {15, {5}, 23}, {16, {6}, 32}, {17, {6}, 33},
                       {20, {3}, 30}, {21, {4}, 31}, {22, {3}, 32}, {23, {4}, 33},
                       {30, {1}, 100}, {31, {2}, 110}, {32, {1}, 120}, {33, {2}, 130}},
                      raws);
    case StructureKind::FlowLow:
      return assemble(kind,
                      {{10, {5}, 20}, {11, {5}, 20}, {12, {6}, 21}, {13, {6}, 21},
                       {20, {3}, 30}, {21, {4}, 31}, {22, {3}, 32}, {23, {4}, 33},
                       {30, {1}, 100}, {31, {2}, 110}, {32, {1}, 120}, {33, {2}, 130}},
                      raws);
    case StructureKind::JobMany:
      return assemble(kind,
                      {{10, {5}, 20}, {11, {5}, 20}, {12, {6}, 21}, {13, {6}, 21},
                       {14, {5}, 22}, {15, {5}, 22}, {16, {6}, 23}, {17, {6}, 23},
                       {20, {3}, 30}, {21, {4}, 31}, {22, {6, 4}, 32}, {23, {1, 4}, 33},
                       {30, {1}, 100}, {31, {2}, 110}, {32, {1, 3}, 120}, {33, {2, 3}, 130}},
                      raws);
  }
  throw std::invalid_argument("unknown structure kind");
}

std::map<MaterialId, double> explode_demand(const ProductionStructure& structure,
                                            const std::map<MaterialId, double>& finished_demand) {
  std::map<MaterialId, double> gross;
  for (const auto& m : structure.materials()) gross[m.id] = 0.0;
  for (const auto& [id, qty] : finished_demand) gross.at(id) += qty;
  for (auto id : structure.planning_order()) {
    for (const auto& c : structure.material(id).components) {
      gross.at(c.component) += gross.at(id) * c.quantity;
    }
  }
  return gross;
}

ProcessingTimes calibrate_processing_times(const ProductionStructure& structure,
                                           const std::map<MaterialId, double>& monthly_forecast,
                                           double rho) {
  if (!(rho > 0)) throw std::invalid_argument("shop load must be positive");
  ProcessingTimes out;
  // rho shifts per working day, 8 h shifts, 20 working days.
  out.target_hours = rho * 8.0 * 20.0;
  const auto gross = explode_demand(structure, monthly_forecast);
  for (const auto& machine : structure.machines()) out.piece_ops[machine.id] = 0.0;
  for (const auto& m : structure.materials()) {
    for (auto j : m.routing) out.piece_ops.at(j) += gross.at(m.id);
  }
  for (const auto& [j, ops] : out.piece_ops) {
    if (!(ops > 0)) {
      throw std::invalid_argument("machine M" + std::to_string(j) +
                                  " carries no piece-operations");
    }
    out.per_machine[j] = out.target_hours / ops;
  }
  return out;
}

std::string_view to_string(StructureKind k) {
  switch (k) {
    case StructureKind::FlowMany: return "flow_many";
    case StructureKind::FlowLow: return "flow_low";
    case StructureKind::JobMany: return "job_many";
  }
  return "?";
}

std::string_view to_string(DemandPattern p) {
  return p == DemandPattern::Constant ? "constant" : "seasonal";
}

std::string_view to_string(CostLevel c) {
  switch (c) {
    case CostLevel::Low: return "low";
    case CostLevel::Med: return "med";
    case CostLevel::High: return "high";
  }
  return "?";
}

StructureKind parse_structure(std::string_view s) {
  if (s == "flow_many") return StructureKind::FlowMany;
  if (s == "flow_low") return StructureKind::FlowLow;
  if (s == "job_many") return StructureKind::JobMany;
  throw ConfigError("structure", "unknown structure kind '" + std::string(s) + "'");
}

DemandPattern parse_pattern(std::string_view s) {
  if (s == "constant") return DemandPattern::Constant;
  if (s == "seasonal") return DemandPattern::Seasonal;
  throw ConfigError("demand_pattern", "unknown demand pattern '" + std::string(s) + "'");
}

CostLevel parse_cost_level(std::string_view s) {
  if (s == "low") return CostLevel::Low;
  if (s == "med") return CostLevel::Med;
  if (s == "high") return CostLevel::High;
  throw ConfigError("cost_level", "unknown cost level '" + std::string(s) + "'");
}

std::string ScenarioConfig::scenario_id() const {
  std::string id;
  id += structure == StructureKind::JobMany ? 'j' : 'f';
  id += '_';
  id += structure == StructureKind::FlowLow ? 'l' : 'm';
  id += '_';
  id += pattern == DemandPattern::Constant ? 'c' : 's';
  return id;
}

void ScenarioConfig::validate() const {
  constexpr double kTol = 1e-9;
  if (!(std::abs(rho - 2.2) < kTol || std::abs(rho - 2.5) < kTol || std::abs(rho - 2.8) < kTol)) {
    throw ConfigError("rho", "shop load must be one of 2.2, 2.5, 2.8");
  }
  if (!(alpha >= 0.0 && alpha <= 0.5 + kTol)) {
    throw ConfigError("alpha", "forecast error parameter must lie in [0, 0.5]");
  }
  if (!(eta >= 0.5 - kTol && eta <= 1.0 + kTol)) {
    throw ConfigError("eta", "planned utilization must lie in [0.5, 1.0]");
  }
  if (years < 1) throw ConfigError("years", "must be at least 1");
  if (warmup_years < 0 || warmup_years >= years) {
    throw ConfigError("warmup_years", "must be in [0, years)");
  }
  if (replications < 1) throw ConfigError("replications", "must be at least 1");
  if (sub_safety_stock < 0) throw ConfigError("sub_safety_stock", "must be non-negative");
  if (!(mip_gap > 0 && mip_gap < 1)) throw ConfigError("mip_gap", "must lie in (0, 1)");
  if (!(plan_holding_days > 0 && plan_holding_days <= 28)) {
    throw ConfigError("plan_holding_days", "must lie in (0, 28]");
  }
}

namespace {

using nlohmann::json;

template <typename T>
T field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, std::string("invalid value (") + e.what() + ")");
  }
}

template <typename F>
auto with_field(const char* key, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("$", "top level must be an object");
  static const std::set<std::string> known{
      "structure",      "demand_pattern", "rho",         "capacity_cost_level",
      "backorder_cost_level", "alpha",    "eta",         "years",
      "warmup_years",   "replications",   "seed",        "seasonal_phase",
      "noise",          "backorder_mode", "offload_policy", "sub_safety_stock",
      "mip_gap",        "plan_holding_days"};
  ScenarioConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (known.count(key) == 0) throw ConfigError(key, "unknown key");
    c.explicit_keys.insert(key);
  }
  auto str = [&](const char* key) { return field<std::string>(doc, key); };
  if (doc.contains("structure")) c.structure = parse_structure(str("structure"));
  if (doc.contains("demand_pattern")) c.pattern = parse_pattern(str("demand_pattern"));
  if (doc.contains("rho")) c.rho = field<double>(doc, "rho");
  if (doc.contains("capacity_cost_level")) {
    c.capacity_cost = with_field("capacity_cost_level",
                                 [&] { return parse_cost_level(str("capacity_cost_level")); });
  }
  if (doc.contains("backorder_cost_level")) {
    c.backorder_cost = with_field("backorder_cost_level",
                                  [&] { return parse_cost_level(str("backorder_cost_level")); });
  }
  if (doc.contains("alpha")) c.alpha = field<double>(doc, "alpha");
  if (doc.contains("eta")) c.eta = field<double>(doc, "eta");
  if (doc.contains("years")) c.years = field<int>(doc, "years");
  if (doc.contains("warmup_years")) c.warmup_years = field<int>(doc, "warmup_years");
  if (doc.contains("replications")) c.replications = field<int>(doc, "replications");
  if (doc.contains("seed")) c.seed = field<std::uint64_t>(doc, "seed");
  if (doc.contains("seasonal_phase")) {
    const auto v = str("seasonal_phase");
    if (v == "prose") c.seasonal_phase = SeasonalPhase::Prose;
    else if (v == "table") c.seasonal_phase = SeasonalPhase::Table;
    else throw ConfigError("seasonal_phase", "expected 'prose' or 'table'");
  }
  if (doc.contains("noise")) {
    const auto v = str("noise");
    if (v == "stochastic") c.noise = NoiseMode::Stochastic;
    else if (v == "degenerate") c.noise = NoiseMode::Degenerate;
    else throw ConfigError("noise", "expected 'stochastic' or 'degenerate'");
  }
  if (doc.contains("backorder_mode")) {
    const auto v = str("backorder_mode");
    if (v == "per_piece") c.backorder_mode = BackorderMode::PerPiece;
    else if (v == "per_order") c.backorder_mode = BackorderMode::PerOrder;
    else throw ConfigError("backorder_mode", "expected 'per_piece' or 'per_order'");
  }
  if (doc.contains("offload_policy")) {
    const auto v = str("offload_policy");
    if (v == "slack") c.offload = OffloadPolicyKind::Slack;
    else if (v == "load") c.offload = OffloadPolicyKind::Load;
    else throw ConfigError("offload_policy", "expected 'slack' or 'load'");
  }
  if (doc.contains("sub_safety_stock")) c.sub_safety_stock = field<double>(doc, "sub_safety_stock");
  if (doc.contains("mip_gap")) c.mip_gap = field<double>(doc, "mip_gap");
  if (doc.contains("plan_holding_days")) c.plan_holding_days = field<double>(doc, "plan_holding_days");
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_json(const ScenarioConfig& c) {
  json doc{
      {"structure", to_string(c.structure)},
      {"demand_pattern", to_string(c.pattern)},
      {"rho", c.rho},
      {"capacity_cost_level", to_string(c.capacity_cost)},
      {"backorder_cost_level", to_string(c.backorder_cost)},
      {"alpha", c.alpha},
      {"eta", c.eta},
      {"years", c.years},
      {"warmup_years", c.warmup_years},
      {"replications", c.replications},
      {"seed", c.seed},
      {"seasonal_phase", c.seasonal_phase == SeasonalPhase::Prose ? "prose" : "table"},
      {"noise", c.noise == NoiseMode::Stochastic ? "stochastic" : "degenerate"},
      {"backorder_mode", c.backorder_mode == BackorderMode::PerPiece ? "per_piece" : "per_order"},
      {"offload_policy", c.offload == OffloadPolicyKind::Slack ? "slack" : "load"},
      {"sub_safety_stock", c.sub_safety_stock},
      {"mip_gap", c.mip_gap},
      {"plan_holding_days", c.plan_holding_days},
  };
  return doc.dump(2);
}

std::vector<double> eta_grid() {
  std::vector<double> g;
  for (int q = 0; q <= 25; ++q) g.push_back(std::round((0.5 + 0.02 * q) * 100.0) / 100.0);
  return g;
}

std::vector<double> alpha_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 10; ++k) g.push_back(std::round(0.05 * k * 100.0) / 100.0);
  return g;
}

}  // namespace hps
