#pragma once

// Deterministic random streams.
//
// std::mt19937_64 is fully specified by the standard, but the std::
// distributions are not, so every variate is derived here from raw 64-bit
// words. Identical seeds give identical streams on any conforming platform.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "plr/core.hpp"

namespace plr {

// SplitMix64 finalizer; used to derive independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  // Poisson(lambda). Sequential inversion below 10, PTRS transformed
  // rejection (Hormann 1993) above.
  std::int64_t poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw ParameterError("poisson: rate must be finite and >= 0");
    }
    if (lambda == 0.0) return 0;
    if (lambda < 10.0) return poisson_inversion(lambda);
    return poisson_ptrs(lambda);
  }

 private:
  std::int64_t poisson_inversion(double lambda) {
    const double u = uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    std::int64_t k = 0;
    while (u > cdf) {
      ++k;
      p *= lambda / static_cast<double>(k);
      cdf += p;
      if (p < std::numeric_limits<double>::min() && k > lambda) break;
    }
    return k;
  }

  std::int64_t poisson_ptrs(double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
          -lambda + kf * loglam - std::lgamma(kf + 1.0)) {
        return static_cast<std::int64_t>(kf);
      }
    }
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Rng seeded_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace plr
