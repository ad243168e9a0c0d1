#include "hps/cost_ledger.hpp"

#include <doctest.h>

using namespace hps;

namespace {

CustomerOrder order(long id, int amount, double due, double delivered) {
  CustomerOrder o;
  o.id = id;
  o.product = 10;
  o.amount = amount;
  o.due = due;
  o.delivered = delivered;
  return o;
}

}  // namespace

TEST_CASE("ledger: holding, backorder and internal examples") {
  CostLedger ledger(cost_rates(CostLevel::Med, CostLevel::Med), BackorderMode::PerPiece, 0.0, 336.0);
  ledger.add_holding(MaterialKind::Finished, 10, 0.0, 10.0);
  CHECK(ledger.costs().holding == doctest::Approx(100.0));
  ledger.add_backorder(10, 5.0, 8.0);
  CHECK(ledger.costs().backorder == doctest::Approx(570.0));
  ledger.add_internal(3.0, 320.0);
  CHECK(ledger.costs().internal == doctest::Approx(32000.0));
  ledger.add_external(3.0, 2.0);
  CHECK(ledger.costs().external == doctest::Approx(400.0));
  CHECK(ledger.costs().total() == doctest::Approx(100.0 + 570.0 + 32000.0 + 400.0));
}

TEST_CASE("ledger: subs cost less to hold, raw material nothing") {
  CostLedger ledger(cost_rates(CostLevel::Med, CostLevel::Med), BackorderMode::PerPiece, 0.0, 100.0);
  ledger.add_holding(MaterialKind::Sub, 10, 0.0, 10.0);
  CHECK(ledger.costs().holding == doctest::Approx(50.0));
  ledger.add_holding(MaterialKind::Raw, 10, 0.0, 10.0);
  CHECK(ledger.costs().holding == doctest::Approx(50.0));
}

TEST_CASE("ledger: per-order backorder mode") {
  CostLedger ledger(cost_rates(CostLevel::Med, CostLevel::Med), BackorderMode::PerOrder, 0.0, 100.0);
  ledger.add_backorder(10, 5.0, 8.0);
  CHECK(ledger.costs().backorder == doctest::Approx(57.0));
}

TEST_CASE("ledger: warmup and post-horizon amounts are not booked") {
  CostLedger ledger(cost_rates(CostLevel::Med, CostLevel::Med), BackorderMode::PerPiece, 100.0, 200.0,
                    true);
  ledger.add_internal(50.0, 320.0);
  ledger.add_external(250.0, 10.0);
  CHECK(ledger.costs().total() == 0.0);
  ledger.add_holding(MaterialKind::Finished, 1, 90.0, 110.0);
  CHECK(ledger.costs().holding == doctest::Approx(10.0));
  ledger.add_backorder(1, 195.0, 205.0);
  CHECK(ledger.costs().backorder == doctest::Approx(5.0 * 19.0));
  CHECK(ledger.journal().size() == 2);
  CHECK(ledger.measured_days() == 100.0);
  CHECK_THROWS_AS(CostLedger(cost_rates(CostLevel::Med, CostLevel::Med), BackorderMode::PerPiece,
                             5.0, 5.0),
                  std::invalid_argument);
}

TEST_CASE("kpi: synthetic trace") {
  // Three orders of 10 pieces: on time, late by 3 days, early.
  CostLedger ledger(cost_rates(CostLevel::Low, CostLevel::Low), BackorderMode::PerPiece, 0.0, 100.0);
  std::vector<CustomerOrder> orders{order(1, 10, 10.0, 10.0), order(2, 10, 20.0, 23.0),
                                    order(3, 10, 30.0, 25.0)};
  for (const auto& o : orders) ledger.add_backorder(o.amount, o.due, o.delivered);
  std::map<MachineId, MachineHours> machines{{1, {240.0, 320.0}}, {2, {0.0, 0.0}}};
  const auto kpi = finalize_run(ledger, orders, machines);
  CHECK(kpi.totals.backorder == doctest::Approx(10 * 3 * 9.0));
  CHECK(kpi.orders == 3);
  CHECK(kpi.late_orders == 1);
  CHECK(kpi.service_level == doctest::Approx(2.0 / 3.0));
  CHECK(kpi.utilization.at(1) == doctest::Approx(0.75));
  CHECK(kpi.utilization.at(2) == 0.0);
  CHECK(kpi.per_day().backorder == doctest::Approx(2.7));
}

TEST_CASE("kpi: open orders are late and charged to the window end") {
  CostLedger ledger(cost_rates(CostLevel::Med, CostLevel::Med), BackorderMode::PerPiece, 0.0, 100.0);
  std::vector<CustomerOrder> orders{order(1, 2, 90.0, -1.0)};
  const auto kpi = finalize_run(ledger, orders, {});
  CHECK(kpi.late_orders == 1);
  CHECK(kpi.service_level == 0.0);
  CHECK(kpi.totals.backorder == doctest::Approx(2 * 10 * 19.0));
}

TEST_CASE("kpi: orders due in the warmup do not count") {
  CostLedger ledger(cost_rates(CostLevel::Med, CostLevel::Med), BackorderMode::PerPiece, 50.0, 100.0);
  std::vector<CustomerOrder> orders{order(1, 2, 10.0, 60.0), order(2, 2, 70.0, 70.0)};
  const auto kpi = finalize_run(ledger, orders, {});
  CHECK(kpi.orders == 1);
  CHECK(kpi.service_level == 1.0);
  CHECK(KpiReport{}.per_day().total() == 0.0);
}
