#pragma once

#include "hps/scenario.hpp"

#include <cstdint>
#include <string>

namespace hps {

/// Outcome of one self-check: pass flag and a one-line summary.
struct CheckResult {
  bool pass = false;
  std::string detail;
};

/// Random small planning models (T <= 3, J <= 2, P <= 2): branch and bound
/// against exhaustive enumeration, relative tolerance 1e-6.
[[nodiscard]] CheckResult check_milp_oracle(int instances = 50, std::uint64_t seed = 20140601);

/// Calibrated times at rho 2.5 (0.08 h on the finished-product machines of
/// flow_many, 0.16 h everywhere on flow_low) and equal machine loads for all
/// structures and shop loads.
[[nodiscard]] CheckResult check_calibration();

/// order_rate(1000 + 200, 10) == 120.
[[nodiscard]] CheckResult check_order_rate();

/// MPS dominance, MRP lot-for-lot conservation and MRP idempotence on
/// random instances.
[[nodiscard]] CheckResult check_planning_stack(int instances = 1000, std::uint64_t seed = 7);

/// Material balance after every event of a traced run, plus byte-identical
/// result rows and traces for two runs with the same seed.
[[nodiscard]] CheckResult check_simulator(const ScenarioConfig& config);

/// Degenerate demand noise, alpha 0: service level 1 and no backorder cost.
[[nodiscard]] CheckResult check_deterministic(const ScenarioConfig& config);

}  // namespace hps
