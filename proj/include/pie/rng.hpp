#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pie {

// Derives an independent stream seed from a base seed.  splitmix64 finalizer;
// the same (base, stream) pair always yields the same value on any platform.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic sampler.  std::<distribution> outputs are implementation
// defined, so the transforms live here; identical seeds give identical draws
// on every toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Uniform on [-sqrt(3), sqrt(3)]: mean 0, variance 1.
  double uniform_unit_var() {
    return (2.0 * uniform() - 1.0) * std::sqrt(3.0);
  }

  // t(5) scaled by sqrt(3/5): mean 0, variance 1.
  double t5_unit_var() {
    double z = normal();
    double chi2 = 0.0;
    for (int i = 0; i < 5; ++i) {
      double g = normal();
      chi2 += g * g;
    }
    return z / std::sqrt(chi2 / 5.0) * std::sqrt(3.0 / 5.0);
  }

  // Laplace(0, 1) scaled by 1/sqrt(2): mean 0, variance 1.
  double laplace_unit_var() {
    double u = uniform() - 0.5;
    double e = -std::log(1.0 - 2.0 * std::abs(u));  // Exp(1)
    return (u < 0.0 ? -e : e) / std::sqrt(2.0);
  }

  // Integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
    for (;;) {
      std::uint64_t r = eng_();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace pie
