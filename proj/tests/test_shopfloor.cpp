#include "hps/shopfloor.hpp"

#include <doctest.h>

#include <sstream>

using namespace hps;

namespace {

ProductionOrder order(long id, MaterialId material, long quantity, long start, long due) {
  ProductionOrder o;
  o.id = id;
  o.material = material;
  o.quantity = quantity;
  o.start = start;
  o.due = due;
  return o;
}

CustomerOrder customer(long id, int amount, double due) {
  CustomerOrder o;
  o.id = id;
  o.product = 10;
  o.amount = amount;
  o.due = due;
  return o;
}

ScenarioConfig short_run() {
  ScenarioConfig c;
  c.years = 1;
  c.warmup_years = 0;
  c.replications = 1;
  c.alpha = 0.1;
  c.eta = 0.9;
  return c;
}

}  // namespace

TEST_CASE("release: components in stock are consumed") {
  const auto s = build_structure(StructureKind::FlowMany);
  const MaterialId comp = s.material(10).components.front().component;
  std::map<MaterialId, long> stock{{comp, 100}};
  std::vector<ProductionOrder> waiting{order(1, 10, 80, 5, 7)};
  const auto released = release_ready_orders(s, waiting, stock, 5.0);
  CHECK(released == std::vector<long>{1});
  CHECK(stock[comp] == 20);
  CHECK(waiting.empty());
}

TEST_CASE("release: missing components keep the order waiting") {
  const auto s = build_structure(StructureKind::FlowMany);
  const MaterialId comp = s.material(10).components.front().component;
  std::map<MaterialId, long> stock{{comp, 50}};
  std::vector<ProductionOrder> waiting{order(1, 10, 80, 5, 7)};
  CHECK(release_ready_orders(s, waiting, stock, 5.0).empty());
  CHECK(stock[comp] == 50);
  REQUIRE(waiting.size() == 1);
  CHECK(waiting[0].state == OrderState::Planned);
}

TEST_CASE("release: start day not reached") {
  const auto s = build_structure(StructureKind::FlowMany);
  const MaterialId comp = s.material(10).components.front().component;
  std::map<MaterialId, long> stock{{comp, 500}};
  std::vector<ProductionOrder> waiting{order(1, 10, 80, 6, 8)};
  CHECK(release_ready_orders(s, waiting, stock, 5.5).empty());
}

TEST_CASE("release: earlier due date takes scarce components first") {
  const auto s = build_structure(StructureKind::FlowMany);
  const MaterialId comp = s.material(10).components.front().component;
  std::map<MaterialId, long> stock{{comp, 60}};
  std::vector<ProductionOrder> waiting{order(1, 10, 50, 0, 9), order(2, 10, 50, 0, 4),
                                       order(3, 10, 10, 0, 12)};
  const auto released = release_ready_orders(s, waiting, stock, 1.0);
  CHECK(released == std::vector<long>{2, 3});
  CHECK(stock[comp] == 0);
  REQUIRE(waiting.size() == 1);
  CHECK(waiting[0].id == 1);
}

TEST_CASE("medd: key and selection") {
  CHECK(medd_key(10.0, 5.0, 24.0) == 10.0);
  CHECK(medd_key(5.5, 5.0, 24.0) == 6.0);
  CHECK(job_slack(10.0, 5.0, 48.0) == doctest::Approx(3.0));
  // Keys 6.0 and 5.8: the job finishing earlier wins despite the later due date.
  const std::vector<QueuedJob> q{{1, 5.5, 24.0, 0.0}, {2, 5.8, 2.4, 0.0}};
  CHECK(select_medd(q, 5.0) == 1);
  // Equal keys: earlier release first, then lower order id.
  const std::vector<QueuedJob> tie{{7, 9.0, 1.0, 2.0}, {3, 9.0, 1.0, 2.0}, {5, 9.0, 1.0, 1.0}};
  CHECK(select_medd(tie, 0.0) == 2);
  const std::vector<QueuedJob> tie2{{7, 9.0, 1.0, 2.0}, {3, 9.0, 1.0, 2.0}};
  CHECK(select_medd(tie2, 0.0) == 1);
  CHECK_THROWS_AS((void)select_medd({}, 0.0), std::invalid_argument);
}

TEST_CASE("fulfill: full deliveries in due-date order") {
  std::vector<CustomerOrder> open{customer(1, 10, 3.0), customer(2, 20, 4.0)};
  long stock = 25;
  const auto done = fulfill_in_due_order(open, stock, 3.5);
  REQUIRE(done.size() == 1);
  CHECK(done[0].id == 1);
  CHECK(done[0].delivered == 3.5);
  CHECK(stock == 15);
  REQUIRE(open.size() == 1);
  CHECK(open[0].id == 2);
  CHECK(open[0].open());
}

TEST_CASE("fulfill: no stock, nothing delivered; exact stock clears all") {
  std::vector<CustomerOrder> open{customer(1, 10, 3.0), customer(2, 20, 4.0)};
  long stock = 0;
  CHECK(fulfill_in_due_order(open, stock, 1.0).empty());
  CHECK(open.size() == 2);
  stock = 30;
  CHECK(fulfill_in_due_order(open, stock, 2.0).size() == 2);
  CHECK(stock == 0);
  CHECK(open.empty());
}

TEST_CASE("fulfill: a later small order waits behind a large earlier one") {
  std::vector<CustomerOrder> open{customer(1, 50, 3.0), customer(2, 5, 4.0)};
  long stock = 20;
  CHECK(fulfill_in_due_order(open, stock, 1.0).empty());
  CHECK(stock == 20);
}

TEST_CASE("offload policies") {
  const SlackOffload slack;
  const LoadOffload load;
  const OffloadContext late{10.0, 9.0, 5.0, 64.0, false};
  CHECK(slack.offload(late));
  CHECK(load.offload(late));
  OffloadContext broke = late;
  broke.budget = 0.0;
  CHECK(!slack.offload(broke));
  CHECK(!load.offload(broke));
  // Positive slack: only the load policy sends queued work out.
  const OffloadContext early{10.0, 20.0, 5.0, 64.0, false};
  CHECK(!slack.offload(early));
  CHECK(load.offload(early));
  OffloadContext idle = early;
  idle.machine_available = true;
  CHECK(!load.offload(idle));
  CHECK(dynamic_cast<const SlackOffload*>(make_offload_policy(OffloadPolicyKind::Slack).get()));
  CHECK(dynamic_cast<const LoadOffload*>(make_offload_policy(OffloadPolicyKind::Load).get()));
}

TEST_CASE("simulation: invariants hold and runs repeat exactly") {
  const auto config = short_run();
  SimOptions opts;
  opts.check_invariants = true;
  std::ostringstream t1, t2;
  opts.trace = &t1;
  Simulation a(config, 42, opts);
  const auto ra = a.run();
  opts.trace = &t2;
  Simulation b(config, 42, opts);
  const auto rb = b.run();
  CHECK(t1.str() == t2.str());
  CHECK(t1.str().size() > 100);
  CHECK(ra.totals.total() == rb.totals.total());
  CHECK(ra.service_level == rb.service_level);
  CHECK(ra.orders > 1000);
  CHECK(ra.service_level >= 0.0);
  CHECK(ra.service_level <= 1.0);
  for (const auto& [j, u] : ra.utilization) {
    CHECK(u >= 0.0);
    CHECK(u <= 1.0 + 1e-9);
  }
  for (const auto& [id, bal] : a.balances()) {
    CHECK(bal.initial + bal.produced - bal.consumed - bal.delivered == a.stock(id));
    CHECK(a.stock(id) >= 0);
  }
  CHECK(a.clock() == doctest::Approx(336.0));
}

TEST_CASE("simulation: different seeds give different demand") {
  const auto config = short_run();
  Simulation a(config, 1);
  Simulation b(config, 2);
  const auto ra = a.run();
  const auto rb = b.run();
  CHECK(ra.orders != rb.orders);
}

TEST_CASE("simulation: internal cost follows the shift plan hours") {
  auto config = short_run();
  config.alpha = 0.0;
  Simulation sim(config, 3);
  const auto r = sim.run();
  // Every machine pays at least the 10-shift hours of each month.
  const double floor = 12 * 320.0 * 6 * config.rates().internal;
  CHECK(r.totals.internal >= floor - 1e-6);
  CHECK(r.totals.internal <= 12 * 480.0 * 6 * config.rates().internal + 1e-6);
}
