#pragma once

#include "hps/scenario.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace hps {

/// Independent random substreams keyed by (base seed, replication, purpose,
/// material, month). Keys are folded with SplitMix64 finalizers and the
/// result seeds a std::mt19937_64, so a stream depends only on its key.
enum class StreamPurpose : std::uint64_t {
  ForecastError = 1,
  Arrivals = 2,
  Amounts = 3,
  LeadTimes = 4,
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t replication,
                                        StreamPurpose purpose, std::int64_t material,
                                        std::int64_t month);

using RngStream = std::mt19937_64;

[[nodiscard]] inline RngStream make_stream(std::uint64_t base, std::uint64_t replication,
                                           StreamPurpose purpose, std::int64_t material,
                                           std::int64_t month) {
  return RngStream(derive_seed(base, replication, purpose, material, month));
}

/// Lognormal law parameterised by mean and variance (moment matched).
struct LognormalMoments {
  double mean = 1.0;
  double variance = 0.0;

  [[nodiscard]] double sigma() const;
  [[nodiscard]] double mu() const;
  /// Returns the mean exactly when the variance is zero.
  [[nodiscard]] double sample(RngStream& rng) const;
};

/// Order amount and required lead time laws for one finished product.
[[nodiscard]] LognormalMoments order_amount_law(MaterialId product);
[[nodiscard]] LognormalMoments lead_time_law();

/// Forecast pieces per month; `month` is one-based and wraps with period 12.
[[nodiscard]] double forecast_value(DemandPattern pattern, MaterialId product, int month,
                                    SeasonalPhase phase = SeasonalPhase::Prose);

/// Normal(0, (alpha F)^2) truncated below at -F. Exactly 0 when alpha or F is 0.
[[nodiscard]] double draw_forecast_error(double forecast, double alpha, RngStream& rng);

/// Orders per month; throws std::invalid_argument for a non-positive mean.
[[nodiscard]] double order_rate(double demand, double mean_amount);

struct CustomerOrder {
  long id = 0;
  MaterialId product = 0;
  int amount = 1;
  double arrival = 0.0;  // day
  double due = 0.0;      // day
  double delivered = -1.0;

  [[nodiscard]] bool open() const { return delivered < 0.0; }
};

enum class ArrivalMode { Poisson, Deterministic };

struct MonthOrderStreams {
  RngStream arrivals;
  RngStream amounts;
  RngStream lead_times;
};

/// Orders of one product over a month window [start_day, start_day + days).
/// `rate` is orders per month. Ids are left at zero for the caller.
[[nodiscard]] std::vector<CustomerOrder> generate_month_orders(
    MaterialId product, double start_day, double days, double rate,
    const LognormalMoments& amount, const LognormalMoments& lead_time, ArrivalMode mode,
    MonthOrderStreams& streams);

}  // namespace hps
