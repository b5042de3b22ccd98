#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace memekf {

/// Finalizer of the splitmix64 generator; full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Splittable 64-bit generator (splitmix64). All randomness in the library
/// flows through this engine so that results are bit-reproducible across
/// platforms; the standard <random> distributions are deliberately avoided
/// because their outputs are implementation-defined.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~0ULL; }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Derives the seed of an independent substream. Streams are addressed by
/// index paths, e.g. substream(seed, run) for a Monte-Carlo run and
/// substream(seed, run, step) for one scan within it.
constexpr std::uint64_t substream(std::uint64_t key, std::uint64_t index) noexcept {
  return mix64(key ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

constexpr std::uint64_t substream(std::uint64_t key, std::uint64_t a, std::uint64_t b) noexcept {
  return substream(substream(key, a), b);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(SplitMix64& gen) noexcept {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

struct NormalPair {
  double a = 0.0;
  double b = 0.0;
};

/// Two independent standard normal deviates (Box-Muller).
inline NormalPair normal_pair(SplitMix64& gen) noexcept {
  double u1 = uniform01(gen);
  while (u1 <= 0.0) u1 = uniform01(gen);
  const double u2 = uniform01(gen);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// Poisson deviate via Knuth's product-of-uniforms method. Adequate for the
/// detection rates used here (mean around 20).
inline int poisson(SplitMix64& gen, double mean) noexcept {
  const double limit = std::exp(-mean);
  int count = -1;
  double product = 1.0;
  do {
    ++count;
    product *= uniform01(gen);
  } while (product > limit);
  return count;
}

}  // namespace memekf
