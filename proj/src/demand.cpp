#include "hps/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hps {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t replication,
                          StreamPurpose purpose, std::int64_t material, std::int64_t month) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ replication);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ static_cast<std::uint64_t>(material));
  h = splitmix64(h ^ static_cast<std::uint64_t>(month));
  return h;
}

double LognormalMoments::sigma() const {
  return std::sqrt(std::log1p(variance / (mean * mean)));
}

double LognormalMoments::mu() const {
  const double s = sigma();
  return std::log(mean) - 0.5 * s * s;
}

double LognormalMoments::sample(RngStream& rng) const {
  if (variance <= 0.0) return mean;
  std::lognormal_distribution<double> dist(mu(), sigma());
  return dist(rng);
}

LognormalMoments order_amount_law(MaterialId product) {
  return product % 2 == 0 ? LognormalMoments{10.0, 2.25} : LognormalMoments{15.0, 6.25};
}

LognormalMoments lead_time_law() { return LognormalMoments{3.0, 3.0}; }

double forecast_value(DemandPattern pattern, MaterialId product, int month, SeasonalPhase phase) {
  const double base = product % 2 == 0 ? 1000.0 : 1500.0;
  if (pattern == DemandPattern::Constant) return base;
  const double angle = 2.0 * std::numbers::pi / 12.0;
  if (phase == SeasonalPhase::Table) {
    return base + 0.5 * base * std::sin(angle * (month - 5));
  }
  // Base in month 1, trough in month 4, peak in month 10.
  const double value = base - 0.5 * base * std::sin(angle * (month - 1));
  return std::max(0.0, value);
}

double draw_forecast_error(double forecast, double alpha, RngStream& rng) {
  if (alpha <= 0.0 || forecast <= 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, alpha * forecast);
  while (true) {
    const double e = dist(rng);
    if (e >= -forecast) return e;
  }
}

double order_rate(double demand, double mean_amount) {
  if (!(mean_amount > 0)) throw std::invalid_argument("mean order amount must be positive");
  if (demand < 0) throw std::invalid_argument("demand must be non-negative");
  return demand / mean_amount;
}

std::vector<CustomerOrder> generate_month_orders(MaterialId product, double start_day,
                                                 double days, double rate,
                                                 const LognormalMoments& amount,
                                                 const LognormalMoments& lead_time,
                                                 ArrivalMode mode, MonthOrderStreams& streams) {
  std::vector<CustomerOrder> orders;
  if (rate <= 0.0) return orders;
  auto make = [&](double offset) {
    CustomerOrder o;
    o.product = product;
    o.arrival = start_day + offset;
    const double raw = amount.sample(streams.amounts);
    o.amount = std::max(1, static_cast<int>(std::lround(raw)));
    o.due = o.arrival + lead_time.sample(streams.lead_times);
    orders.push_back(o);
  };
  if (mode == ArrivalMode::Deterministic) {
    const double spacing = days / rate;
    for (long k = 0; (k + 0.5) * spacing < days; ++k) make((k + 0.5) * spacing);
    return orders;
  }
  std::exponential_distribution<double> gap(rate / days);
  double t = gap(streams.arrivals);
  while (t < days) {
    make(t);
    t += gap(streams.arrivals);
  }
  return orders;
}

}  // namespace hps
