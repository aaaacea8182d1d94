#pragma once

#include <concepts>
#include <cstdint>

#include "signalsim/rng.hpp"
#include "signalsim/units.hpp"
#include "signalsim/world.hpp"

namespace signalsim {

// Per-class waiting-vehicle counts for one approach at one instant. This is
// the seam where a camera + object-detector pipeline would plug in.
struct DetectionSnapshot {
  Direction approach = Direction::Right;
  std::int64_t tick = 0;
  PerClass<std::uint32_t> counts{};

  friend bool operator==(const DetectionSnapshot&, const DetectionSnapshot&) = default;
};

// Independent per-class Bernoulli thinning of true vehicles plus Poisson
// spurious detections. Defaults are the identity (perfect detector).
struct NoiseParams {
  PerClass<double> detect_prob{1.0, 1.0, 1.0, 1.0, 1.0};
  PerClass<double> false_per_snapshot{0.0, 0.0, 0.0, 0.0, 0.0};

  bool is_identity() const noexcept {
    for (std::size_t i = 0; i < kNumClasses; ++i) {
      if (detect_prob[i] != 1.0 || false_per_snapshot[i] != 0.0) return false;
    }
    return true;
  }

  friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

inline DetectionSnapshot ground_truth(const World& world, Direction approach) {
  return {approach, world.tick(), waiting_counts(world, approach)};
}

inline DetectionSnapshot apply_noise(const DetectionSnapshot& truth, const NoiseParams& params,
                                     Rng& rng) {
  DetectionSnapshot out{truth.approach, truth.tick, {}};
  for (auto k : kAllKinds) {
    const auto i = index(k);
    std::uint32_t kept = 0;
    for (std::uint32_t n = 0; n < truth.counts[i]; ++n) {
      if (rng.bernoulli(params.detect_prob[i])) ++kept;
    }
    out.counts[i] = kept + rng.poisson(params.false_per_snapshot[i]);
  }
  return out;
}

template <class D>
concept Detector = requires(D& d, const World& w, Direction a) {
  { d.capture(w, a) } -> std::same_as<DetectionSnapshot>;
};

struct GroundTruthDetector {
  DetectionSnapshot capture(const World& world, Direction approach) const {
    return ground_truth(world, approach);
  }
};

// Owns its own noise stream so detector randomness never perturbs arrivals.
class NoisyDetector {
 public:
  NoisyDetector(NoiseParams params, std::uint64_t seed)
      : params_(params), rng_(seed, Stream::DetectionNoise) {}

  DetectionSnapshot capture(const World& world, Direction approach) {
    return apply_noise(ground_truth(world, approach), params_, rng_);
  }

 private:
  NoiseParams params_;
  Rng rng_;
};

}  // namespace signalsim
