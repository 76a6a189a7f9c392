#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ringcav {

/// SplitMix64 finalizer. Used to derive independent child seeds from a root seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return mix_seed(mix_seed(mix_seed(root) ^ a) ^ b);
}

/// Reproducible variate source.
///
/// Engine is std::mt19937_64, whose output sequence is fixed by the C++ standard.
/// The distribution layer is implemented here instead of using <random>'s
/// distributions, whose algorithms are implementation-defined:
///   uniform  = (engine() >> 11) * 2^-53            in [0, 1)
///   gaussian = Box-Muller, cosine branch only       (one engine pair per variate)
/// Changing either mapping changes every sampled ensemble; treat it as a format.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ringcav
