#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "signalsim/scenario.hpp"

namespace signalsim {

/// The built-in 15-scenario static-vs-adaptive benchmark.
///
/// Three arrival regimes, all 300 s long with fixed seeds:
///
///   sim01-sim04  near-equal weights (each within 0.03 of 0.25) under
///                saturating demand (p_arrival 0.8)
///   sim05-sim08, sim14, sim15
///                exactly uniform weights under moderate demand (p_arrival 0.13)
///   sim09-sim13  one dominant approach (weight >= 0.6) at p_arrival 0.1
///
/// Weights and loads are calibration choices. The near-equal and uniform
/// regimes differ mainly in load.
inline std::vector<ScenarioConfig> builtin_suite() {
  struct Row {
    const char* name;
    PerApproach<double> weights;
    double p_arrival;
  };
  constexpr double kHeavy = 0.8;
  constexpr double kModerate = 0.13;
  constexpr double kSkewLoad = 0.1;
  const std::array<Row, 15> rows{{
      {"sim01", {0.26, 0.24, 0.25, 0.25}, kHeavy},
      {"sim02", {0.28, 0.22, 0.27, 0.23}, kHeavy},
      {"sim03", {0.22, 0.28, 0.24, 0.26}, kHeavy},
      {"sim04", {0.27, 0.25, 0.22, 0.26}, kHeavy},
      {"sim05", {0.25, 0.25, 0.25, 0.25}, kModerate},
      {"sim06", {0.25, 0.25, 0.25, 0.25}, kModerate},
      {"sim07", {0.25, 0.25, 0.25, 0.25}, kModerate},
      {"sim08", {0.25, 0.25, 0.25, 0.25}, kModerate},
      {"sim09", {0.70, 0.10, 0.10, 0.10}, kSkewLoad},
      {"sim10", {0.10, 0.60, 0.15, 0.15}, kSkewLoad},
      {"sim11", {0.10, 0.10, 0.65, 0.15}, kSkewLoad},
      {"sim12", {0.15, 0.10, 0.10, 0.65}, kSkewLoad},
      {"sim13", {0.10, 0.10, 0.10, 0.70}, kSkewLoad},
      {"sim14", {0.25, 0.25, 0.25, 0.25}, kModerate},
      {"sim15", {0.25, 0.25, 0.25, 0.25}, kModerate},
  }};

  std::vector<ScenarioConfig> suite;
  suite.reserve(rows.size());
  std::uint64_t seed = 1001;
  for (const auto& r : rows) {
    ScenarioConfig s;
    s.name = r.name;
    s.duration = 300.0;
    s.arrival_weights = r.weights;
    s.p_arrival = r.p_arrival;
    s.seed = seed++;
    suite.push_back(s);
  }
  return suite;
}

/// Replications per scenario used by the built-in suite.
inline constexpr int kDefaultReplications = 5;

}  // namespace signalsim
