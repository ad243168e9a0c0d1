#include "hps/shopfloor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hps {

bool SlackOffload::offload(const OffloadContext& c) const {
  return job_slack(c.due, c.clock, c.remaining_hours) < 0.0 && c.budget >= c.remaining_hours;
}

bool LoadOffload::offload(const OffloadContext& c) const {
  if (c.budget < c.remaining_hours) return false;
  return !c.machine_available || job_slack(c.due, c.clock, c.remaining_hours) < 0.0;
}

std::unique_ptr<OffloadPolicy> make_offload_policy(OffloadPolicyKind kind) {
  if (kind == OffloadPolicyKind::Slack) return std::make_unique<SlackOffload>();
  return std::make_unique<LoadOffload>();
}

double job_slack(double due, double clock, double remaining_hours) {
  return due - clock - remaining_hours / 24.0;
}

double medd_key(double due, double clock, double remaining_hours) {
  return std::max(due, clock + remaining_hours / 24.0);
}

std::size_t select_medd(const std::vector<QueuedJob>& queue, double clock) {
  if (queue.empty()) throw std::invalid_argument("select_medd: empty queue");
  std::size_t best = 0;
  double best_key = medd_key(queue[0].due, clock, queue[0].remaining_hours);
  for (std::size_t i = 1; i < queue.size(); ++i) {
    const auto& q = queue[i];
    const double key = medd_key(q.due, clock, q.remaining_hours);
    const auto& b = queue[best];
    if (key < best_key || (key == best_key && (q.released < b.released ||
                                               (q.released == b.released && q.order < b.order)))) {
      best = i;
      best_key = key;
    }
  }
  return best;
}

std::vector<CustomerOrder> fulfill_in_due_order(std::vector<CustomerOrder>& open, long& stock,
                                                double clock) {
  std::vector<CustomerOrder> done;
  std::size_t n = 0;
  while (n < open.size() && open[n].amount <= stock) {
    stock -= open[n].amount;
    open[n].delivered = clock;
    done.push_back(open[n]);
    ++n;
  }
  open.erase(open.begin(), open.begin() + static_cast<std::ptrdiff_t>(n));
  return done;
}

namespace {

bool due_before(const ProductionOrder& a, const ProductionOrder& b) {
  return a.due != b.due ? a.due < b.due : a.id < b.id;
}

bool components_available(const ProductionStructure& st, const ProductionOrder& o,
                          const std::map<MaterialId, long>& stock) {
  for (const auto& line : st.material(o.material).components) {
    if (st.material(line.component).kind == MaterialKind::Raw) continue;
    const auto it = stock.find(line.component);
    const long have = it == stock.end() ? 0 : it->second;
    if (have < o.quantity * line.quantity) return false;
  }
  return true;
}

}  // namespace

std::vector<long> release_ready_orders(const ProductionStructure& structure,
                                       std::vector<ProductionOrder>& waiting,
                                       std::map<MaterialId, long>& stock, double clock) {
  std::sort(waiting.begin(), waiting.end(), due_before);
  std::vector<long> released;
  std::vector<ProductionOrder> keep;
  for (auto& o : waiting) {
    if (static_cast<double>(o.start) <= clock && components_available(structure, o, stock)) {
      for (const auto& line : structure.material(o.material).components) {
        if (structure.material(line.component).kind == MaterialKind::Raw) continue;
        stock[line.component] -= o.quantity * line.quantity;
      }
      o.state = OrderState::Released;
      released.push_back(o.id);
    } else {
      keep.push_back(o);
    }
  }
  waiting = std::move(keep);
  return released;
}

const char* to_string(EventType t) {
  switch (t) {
    case EventType::Completion: return "completion";
    case EventType::ExternalCompletion: return "external_completion";
    case EventType::ShiftEnd: return "shift_end";
    case EventType::DayStart: return "day_start";
    case EventType::Arrival: return "arrival";
  }
  return "?";
}

namespace {

struct EventLater {
  bool operator()(const SimEvent& x, const SimEvent& y) const {
    if (x.time != y.time) return x.time > y.time;
    if (x.type != y.type) return static_cast<int>(x.type) > static_cast<int>(y.type);
    return x.seq > y.seq;
  }
};

struct Job {
  long order = 0;
  std::size_t op = 0;
  double remaining = 0.0;  // hours at the current operation
  double released = 0.0;
};

struct MachineState {
  MachineId id = 0;
  int plan = 1;
  double budget = 0.0;
  bool on_shift = false;
  double shift_end = 0.0;
  long current = -1;  // job index
  bool processing = false;
  double busy_since = 0.0;
  std::vector<long> queue;  // job indices
  MachineHours hours;
};

constexpr double kTimeTol = 1e-9;

}  // namespace

struct Simulation::State {
  ScenarioConfig config;
  std::uint64_t seed;
  SimOptions options;
  SimObserver* observer;

  Calendar calendar;
  ProductionStructure structure;
  ProcessingTimes times;
  CostRates rates;
  MrpParams mrp;
  std::unique_ptr<OffloadPolicy> policy;
  CostLedger ledger;
  double horizon;
  double warmup_end;

  std::vector<MaterialId> products;
  std::map<MaterialId, int> product_row;
  std::vector<MachineState> machines;
  std::map<MachineId, std::size_t> machine_index;

  double clock = 0.0;
  long seq = 0;
  std::priority_queue<SimEvent, std::vector<SimEvent>, EventLater> events;

  std::map<MaterialId, long> stock;
  std::map<MaterialId, double> stock_since;
  std::map<MaterialId, MaterialBalance> balance;

  std::vector<ProductionOrder> orders;  // indexed by id
  std::vector<ProductionOrder> waiting;
  std::vector<Job> jobs;
  std::vector<CustomerOrder> customers;  // indexed by id
  std::map<MaterialId, std::vector<CustomerOrder>> open;
  std::map<MachineId, double> external_used;

  ProgramSchedule program;
  bool finished = false;

  State(const ScenarioConfig& cfg, std::uint64_t sd, SimOptions opts, SimObserver* obs)
      : config(cfg),
        seed(sd),
        options(opts),
        observer(obs),
        structure(build_structure(cfg.structure)),
        rates(cfg.rates()),
        ledger(cfg.rates(), cfg.backorder_mode,
               static_cast<double>(cfg.warmup_years * Calendar{}.days_per_year()),
               static_cast<double>(cfg.years * Calendar{}.days_per_year()), opts.journal) {
    config.validate();
    horizon = static_cast<double>(config.years * calendar.days_per_year());
    warmup_end = static_cast<double>(config.warmup_years * calendar.days_per_year());
    products = structure.finished();
    std::map<MaterialId, double> average;
    for (std::size_t p = 0; p < products.size(); ++p) {
      double sum = 0.0;
      for (int m = 1; m <= 12; ++m) {
        sum += forecast_value(config.pattern, products[p], m, config.seasonal_phase);
      }
      average[products[p]] = sum / 12.0;
      product_row[products[p]] = static_cast<int>(p);
    }
    times = calibrate_processing_times(structure, average, config.rho);
    mrp = default_mrp_params(structure, config.pattern, config.seasonal_phase,
                             std::lround(config.sub_safety_stock));
    policy = make_offload_policy(config.offload);
    for (const auto& m : structure.machines()) {
      MachineState ms;
      ms.id = m.id;
      machine_index[m.id] = machines.size();
      machines.push_back(ms);
      external_used[m.id] = 0.0;
    }
    // Start near a steady state: safety stock plus average requirements over
    // the planned lead times of the material and everything below it.
    std::map<MaterialId, double> daily;
    for (const MaterialId id : structure.planning_order()) {
      if (structure.material(id).kind == MaterialKind::Finished) {
        daily[id] += average[id] / calendar.working_days_per_month;
      }
      for (const auto& line : structure.material(id).components) {
        daily[line.component] += line.quantity * daily[id];
      }
    }
    for (const auto& m : structure.materials()) {
      if (m.kind == MaterialKind::Raw) continue;
      const long initial =
          mrp.safety(m.id) +
          std::lround(daily[m.id] * mrp.planned_lead_time * structure.depth(m.id));
      stock[m.id] = initial;
      stock_since[m.id] = 0.0;
      balance[m.id].initial = initial;
    }
  }

  void push(double time, EventType type, long a = 0, long b = 0) {
    events.push(SimEvent{time, type, seq++, a, b});
  }

  // Stock changes go through here so holding cost is integrated exactly.
  void change_stock(MaterialId id, long delta) {
    const auto kind = structure.material(id).kind;
    ledger.add_holding(kind, stock[id], stock_since[id], clock);
    stock_since[id] = clock;
    stock[id] += delta;
  }

  // ---- planning -------------------------------------------------------

  void replan(int month) {
    // Net position: stock beyond the MRP safety stock, less past-due backlog.
    Eigen::VectorXd l0(static_cast<Eigen::Index>(products.size()));
    for (std::size_t p = 0; p < products.size(); ++p) {
      const MaterialId id = products[p];
      long net = stock[id] - mrp.safety(id);
      for (const auto& o : open[id]) {
        if (o.due < clock) net -= o.amount;
      }
      l0(static_cast<Eigen::Index>(p)) = static_cast<double>(net);
    }
    const int first = month % calendar.months_per_year + 1;
    const auto model = make_app_model(structure, times, config, calendar, first, l0);
    SolverOptions so;
    so.relative_gap = config.mip_gap;
    so.node_limit = options.app_node_limit;
    const auto solution = solve_app(model, so);
    if (observer) observer->on_plan(model, solution);
    // The whole plan feeds the MPS look-ahead; only months up to the next
    // replan are executed (shift plans and external budgets).
    program = ProgramSchedule(bind_plan(model, solution, month, model.horizon), calendar);
  }

  void start_month(int month) {
    if (month % 4 == 0) replan(month);
    const auto& plan = program.plan();
    const int col = std::clamp(month - plan.first_month, 0, plan.months() - 1);
    for (std::size_t j = 0; j < machines.size(); ++j) {
      auto& m = machines[j];
      // AppModel machine columns follow the structure's machine order.
      m.plan = plan.shift_plan(col, static_cast<Eigen::Index>(j));
      m.budget = plan.external(col, static_cast<Eigen::Index>(j));
    }
    generate_orders(month);
    for (std::size_t j = 0; j < machines.size(); ++j) offload_queue(j, false);
  }

  void generate_orders(int month) {
    const double start = static_cast<double>(month * calendar.calendar_days_per_month);
    const bool degenerate = config.noise == NoiseMode::Degenerate;
    for (const MaterialId p : products) {
      const int cal_month = month % calendar.months_per_year + 1;
      const double f = forecast_value(config.pattern, p, cal_month, config.seasonal_phase);
      auto err_rng = make_stream(seed, 0, StreamPurpose::ForecastError, p, month);
      const double demand = std::max(0.0, f + draw_forecast_error(f, config.alpha, err_rng));
      auto amount = order_amount_law(p);
      auto lead = lead_time_law();
      if (degenerate) {
        amount.variance = 0.0;
        lead.variance = 0.0;
      }
      MonthOrderStreams streams{make_stream(seed, 0, StreamPurpose::Arrivals, p, month),
                                make_stream(seed, 0, StreamPurpose::Amounts, p, month),
                                make_stream(seed, 0, StreamPurpose::LeadTimes, p, month)};
      const double rate = order_rate(demand, amount.mean);
      auto batch = generate_month_orders(
          p, start, calendar.calendar_days_per_month, rate, amount, lead,
          degenerate ? ArrivalMode::Deterministic : ArrivalMode::Poisson, streams);
      for (auto& o : batch) {
        o.id = static_cast<long>(customers.size());
        customers.push_back(o);
        push(o.arrival, EventType::Arrival, o.id);
      }
    }
  }

  void run_mrp(long today) {
    const auto H = static_cast<std::size_t>(mrp.mrp_horizon);
    const auto HM = static_cast<std::size_t>(mrp.mps_horizon);
    MrpInput in;
    in.today = today;
    for (const MaterialId p : products) {
      std::vector<long> demand(HM, 0);
      for (const auto& o : open[p]) {
        const long offset = std::max(0L, static_cast<long>(std::floor(o.due)) - today);
        if (offset < static_cast<long>(HM)) demand[static_cast<std::size_t>(offset)] += o.amount;
      }
      std::vector<long> prog(HM, 0);
      const int row = product_row[p];
      for (std::size_t k = 0; k < HM; ++k) prog[k] = program.quantity(row, today + static_cast<long>(k));
      const std::vector<long> target(HM, program.planned_inventory(row, static_cast<double>(today)));
      auto mps = compute_mps(demand, prog, target);
      mps.resize(H);
      in.gross[p] = std::move(mps);
    }
    for (const auto& o : waiting) {
      const auto offset = static_cast<std::size_t>(std::max(0L, o.start - today));
      if (offset >= H) continue;
      for (const auto& line : structure.material(o.material).components) {
        if (structure.material(line.component).kind == MaterialKind::Raw) continue;
        auto& g = in.gross[line.component];
        g.resize(H, 0);
        g[offset] += o.quantity * line.quantity;
      }
    }
    for (const auto& o : orders) {
      if (o.state == OrderState::Finished) continue;
      const auto offset = static_cast<std::size_t>(std::max(0L, o.due - today));
      if (offset >= H) continue;
      auto& r = in.receipts[o.material];
      r.resize(H, 0);
      r[offset] += o.quantity;
    }
    in.on_hand = stock;
    const auto result = schedule_and_explode(structure, mrp, in);
    for (auto o : result.orders) {
      if (o.start > today) continue;
      o.id = static_cast<long>(orders.size());
      orders.push_back(o);
      waiting.push_back(o);
    }
  }

  void release() {
    if (waiting.empty()) return;
    // Work on a copy of the stock so holding is booked through change_stock.
    auto avail = stock;
    const auto ids = release_ready_orders(structure, waiting, avail, clock);
    for (const long id : ids) {
      auto& o = orders[static_cast<std::size_t>(id)];
      o.state = OrderState::Released;
      for (const auto& line : structure.material(o.material).components) {
        if (structure.material(line.component).kind == MaterialKind::Raw) continue;
        const long q = o.quantity * line.quantity;
        change_stock(line.component, -q);
        balance[line.component].consumed += q;
      }
      Job job;
      job.order = id;
      job.released = clock;
      jobs.push_back(job);
      arrive_at_machine(static_cast<long>(jobs.size()) - 1);
    }
  }

  // ---- shop floor -----------------------------------------------------

  [[nodiscard]] const Material& job_material(const Job& j) const {
    return structure.material(orders[static_cast<std::size_t>(j.order)].material);
  }

  [[nodiscard]] std::size_t job_machine(const Job& j) const {
    return machine_index.at(job_material(j).routing.at(j.op));
  }

  [[nodiscard]] OffloadContext context(const Job& j, const MachineState& m, bool available) const {
    OffloadContext c;
    c.clock = clock;
    c.due = static_cast<double>(orders[static_cast<std::size_t>(j.order)].due);
    c.remaining_hours = j.remaining;
    c.budget = m.budget;
    c.machine_available = available;
    return c;
  }

  void send_external(long job, std::size_t mi) {
    auto& m = machines[mi];
    const double hours = jobs[static_cast<std::size_t>(job)].remaining;
    m.budget -= hours;
    external_used[m.id] += hours;
    ledger.add_external(clock, hours);
    push(clock + hours / 24.0, EventType::ExternalCompletion, job, static_cast<long>(mi));
  }

  void arrive_at_machine(long job) {
    auto& j = jobs[static_cast<std::size_t>(job)];
    auto& o = orders[static_cast<std::size_t>(j.order)];
    const auto mi = job_machine(j);
    auto& m = machines[mi];
    j.remaining = static_cast<double>(o.quantity) * times.operation_hours(job_material(j), j.op);
    o.state = OrderState::InProcess;
    const bool available = m.on_shift && m.current < 0;
    if (j.remaining > 0.0 && policy->offload(context(j, m, available))) {
      send_external(job, mi);
      return;
    }
    m.queue.push_back(job);
    dispatch(mi);
  }

  void offload_queue(std::size_t mi, bool available) {
    auto& m = machines[mi];
    std::vector<long> keep;
    for (const long job : m.queue) {
      const auto& j = jobs[static_cast<std::size_t>(job)];
      if (policy->offload(context(j, m, available))) {
        send_external(job, mi);
      } else {
        keep.push_back(job);
      }
    }
    m.queue = std::move(keep);
  }

  void start_processing(std::size_t mi) {
    auto& m = machines[mi];
    const auto& j = jobs[static_cast<std::size_t>(m.current)];
    m.processing = true;
    m.busy_since = clock;
    const double finish = clock + j.remaining / 24.0;
    if (finish <= m.shift_end + kTimeTol) {
      push(std::min(finish, m.shift_end), EventType::Completion, static_cast<long>(mi), m.current);
    }
  }

  void stop_processing(std::size_t mi) {
    auto& m = machines[mi];
    if (!m.processing) return;
    auto& j = jobs[static_cast<std::size_t>(m.current)];
    const double hours = (clock - m.busy_since) * 24.0;
    j.remaining = std::max(0.0, j.remaining - hours);
    const double counted = std::max(0.0, std::min(clock, horizon) - std::max(m.busy_since, warmup_end));
    m.hours.busy += counted * 24.0;
    m.processing = false;
  }

  void dispatch(std::size_t mi) {
    auto& m = machines[mi];
    if (!m.on_shift) return;
    if (m.current >= 0) {
      if (!m.processing) start_processing(mi);
      return;
    }
    offload_queue(mi, true);
    if (m.queue.empty()) return;
    std::vector<QueuedJob> view;
    view.reserve(m.queue.size());
    for (const long job : m.queue) {
      const auto& j = jobs[static_cast<std::size_t>(job)];
      view.push_back(QueuedJob{j.order, static_cast<double>(orders[static_cast<std::size_t>(j.order)].due),
                               j.remaining, j.released});
    }
    const auto pick = select_medd(view, clock);
    m.current = m.queue[pick];
    m.queue.erase(m.queue.begin() + static_cast<std::ptrdiff_t>(pick));
    start_processing(mi);
  }

  void advance_job(long job) {
    auto& j = jobs[static_cast<std::size_t>(job)];
    const auto& mat = job_material(j);
    ++j.op;
    if (j.op < mat.routing.size()) {
      arrive_at_machine(job);
      return;
    }
    auto& o = orders[static_cast<std::size_t>(j.order)];
    o.state = OrderState::Finished;
    o.completed = clock;
    change_stock(o.material, o.quantity);
    balance[o.material].produced += o.quantity;
    if (mat.kind == MaterialKind::Finished) fulfill(o.material);
    release();
  }

  void fulfill(MaterialId product) {
    auto& list = open[product];
    if (list.empty()) return;
    long avail = stock[product];
    const auto done = fulfill_in_due_order(list, avail, clock);
    for (const auto& o : done) {
      change_stock(product, -o.amount);
      balance[product].delivered += o.amount;
      customers[static_cast<std::size_t>(o.id)].delivered = clock;
      ledger.add_backorder(o.amount, o.due, clock);
    }
  }

  // ---- events ---------------------------------------------------------

  void on_day_start(long day) {
    const int month = calendar.month_of(static_cast<double>(day));
    if (day % calendar.calendar_days_per_month == 0) start_month(month);
    const bool working = Calendar::is_working_day(day);
    if (working) {
      for (auto& m : machines) {
        const double hours = calendar.shift_hours_per_day[static_cast<std::size_t>(m.plan)];
        ledger.add_internal(static_cast<double>(day), hours);
        if (static_cast<double>(day) >= warmup_end) m.hours.available += hours;
      }
    }
    run_mrp(day);
    release();
    if (working) {
      for (std::size_t mi = 0; mi < machines.size(); ++mi) {
        auto& m = machines[mi];
        m.on_shift = true;
        m.shift_end = static_cast<double>(day) +
                      calendar.shift_hours_per_day[static_cast<std::size_t>(m.plan)] / 24.0;
        push(m.shift_end, EventType::ShiftEnd, static_cast<long>(mi));
        dispatch(mi);
      }
    }
    if (static_cast<double>(day + 1) < horizon) push(static_cast<double>(day + 1), EventType::DayStart, day + 1);
  }

  void handle(const SimEvent& e) {
    switch (e.type) {
      case EventType::DayStart:
        on_day_start(e.a);
        break;
      case EventType::Arrival: {
        const auto& c = customers[static_cast<std::size_t>(e.a)];
        auto& list = open[c.product];
        const auto pos = std::upper_bound(list.begin(), list.end(), c, [](const CustomerOrder& x, const CustomerOrder& y) {
          return x.due != y.due ? x.due < y.due : x.id < y.id;
        });
        list.insert(pos, c);
        fulfill(c.product);
        break;
      }
      case EventType::Completion: {
        const auto mi = static_cast<std::size_t>(e.a);
        stop_processing(mi);
        auto& m = machines[mi];
        const long job = m.current;
        jobs[static_cast<std::size_t>(job)].remaining = 0.0;
        m.current = -1;
        advance_job(job);
        dispatch(mi);
        break;
      }
      case EventType::ExternalCompletion:
        advance_job(e.a);
        break;
      case EventType::ShiftEnd: {
        const auto mi = static_cast<std::size_t>(e.a);
        auto& m = machines[mi];
        if (!m.on_shift || m.shift_end != e.time) break;
        stop_processing(mi);
        m.on_shift = false;
        break;
      }
    }
  }

  void trace(const SimEvent& e) const {
    auto& out = *options.trace;
    out << std::fixed << std::setprecision(6) << e.time << ',' << to_string(e.type) << ',' << e.a
        << ',' << e.b << '\n';
  }

  void check_invariants() const {
    for (const auto& [id, b] : balance) {
      const long s = stock.at(id);
      if (s < 0) throw std::logic_error("negative stock of material " + std::to_string(id));
      if (b.initial + b.produced - b.consumed - b.delivered != s) {
        throw std::logic_error("material balance broken for " + std::to_string(id));
      }
    }
  }

  // Rebuilds the balances from order records alone.
  void recount() const {
    std::map<MaterialId, long> level;
    for (const auto& [id, b] : balance) level[id] = b.initial;
    for (const auto& o : orders) {
      if (o.state == OrderState::Finished) level[o.material] += o.quantity;
      if (o.state == OrderState::Planned) continue;
      for (const auto& line : structure.material(o.material).components) {
        if (structure.material(line.component).kind == MaterialKind::Raw) continue;
        level[line.component] -= o.quantity * line.quantity;
      }
    }
    for (const auto& c : customers) {
      if (!c.open()) level[c.product] -= c.amount;
    }
    for (const auto& [id, v] : level) {
      if (v != stock.at(id)) throw std::logic_error("stock recount mismatch for " + std::to_string(id));
    }
  }

  KpiReport run(const Simulation& self) {
    if (finished) throw std::logic_error("Simulation::run called twice");
    finished = true;
    push(0.0, EventType::DayStart, 0);
    while (!events.empty()) {
      const SimEvent e = events.top();
      if (e.time >= horizon) break;
      events.pop();
      if (e.time < clock) throw std::logic_error("event queue went back in time");
      clock = e.time;
      handle(e);
      if (options.trace) trace(e);
      if (options.check_invariants) {
        check_invariants();
        if (e.type == EventType::DayStart) recount();
      }
      if (observer) observer->on_event(e, self);
    }
    clock = horizon;
    for (std::size_t mi = 0; mi < machines.size(); ++mi) stop_processing(mi);
    for (const auto& [id, s] : stock) change_stock(id, 0);
    std::map<MachineId, MachineHours> hours;
    for (const auto& m : machines) hours[m.id] = m.hours;
    return finalize_run(ledger, customers, hours);
  }
};

Simulation::Simulation(const ScenarioConfig& config, std::uint64_t seed, SimOptions options,
                       SimObserver* observer)
    : s_(std::make_unique<State>(config, seed, options, observer)) {}

Simulation::~Simulation() = default;

KpiReport Simulation::run() { return s_->run(*this); }
double Simulation::clock() const { return s_->clock; }
long Simulation::stock(MaterialId id) const {
  const auto it = s_->stock.find(id);
  return it == s_->stock.end() ? 0 : it->second;
}
const std::map<MaterialId, MaterialBalance>& Simulation::balances() const { return s_->balance; }
const std::vector<ProductionOrder>& Simulation::production_orders() const { return s_->orders; }
const std::vector<CustomerOrder>& Simulation::customer_orders() const { return s_->customers; }
const CostLedger& Simulation::ledger() const { return s_->ledger; }
const ProductionStructure& Simulation::structure() const { return s_->structure; }
const std::map<MachineId, double>& Simulation::external_hours() const { return s_->external_used; }

}  // namespace hps
