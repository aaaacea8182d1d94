#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace signalsim {

// Independent random streams derived from one scenario seed. Arrivals and
// detector noise never share a stream, so swapping the controller or the
// detector cannot shift the arrival sequence.
enum class Stream : std::uint32_t { Arrivals = 0, DetectionNoise = 1 };

/// Seeded generator with a fully specified output sequence.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq, both of which
/// the standard pins bit-for-bit. Distributions are implemented here rather
/// than taken from <random> because the library's distribution algorithms are
/// implementation-defined and would break cross-platform byte determinism.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, Stream stream = Stream::Arrivals) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    engine_.seed(seq);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn with probability proportional to `weights`.
  std::size_t categorical(std::span<const double> weights) { return pick(weights, uniform()); }

  /// Knuth's multiplication method; exact for the small means used for
  /// spurious detections.
  std::uint32_t poisson(double mean) {
    const double limit = std::exp(-mean);
    std::uint32_t k = 0;
    double product = uniform();
    while (product >= limit && product > 0.0) {
      ++k;
      product *= uniform();
    }
    return k;
  }

  /// Maps u in [0,1) onto `weights` by cumulative sum. Falls back to the last
  /// positive-weight index when rounding leaves u above the final sum.
  static std::size_t pick(std::span<const double> weights, double u) {
    const double total = sum(weights);
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      acc += weights[i];
      if (u * total < acc) return i;
    }
    return last_positive;
  }

 private:
  static double sum(std::span<const double> w) {
    double s = 0.0;
    for (double x : w) s += x > 0.0 ? x : 0.0;
    return s;
  }

  std::mt19937_64 engine_;
};

}  // namespace signalsim
