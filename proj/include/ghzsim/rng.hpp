#pragma once

// Self-contained deterministic random number generation. The standard
// library distributions are implementation-defined, so seeded runs would
// not be reproducible across toolchains; everything random in this project
// goes through this header instead.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ghzsim::rng {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent substream id from a base seed and a stream index.
/// Chaining derive_stream calls builds hierarchical seeds (scenario -> state
/// -> shot) that are stable regardless of evaluation order.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0xd1342543de82ef95ULL * (stream + 0x632be59bd9b4e019ULL));
  return splitmix64_next(s);
}

/// xoshiro256++ with splitmix64 seeding.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Poisson draw by inversion (sequential search). Splits large means so the
  /// cumulative product never underflows.
  std::int64_t poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson mean must be >= 0");
    if (mean == 0.0) return 0;
    std::int64_t total = 0;
    while (mean > 500.0) {
      total += poisson(mean / 2.0);
      mean /= 2.0;
    }
    const double u = uniform01();
    double p = std::exp(-mean);
    double cum = p;
    std::int64_t k = 0;
    while (u > cum && k < 100000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
    }
    return total + k;
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape) {
    if (shape <= 0.0) throw std::invalid_argument("gamma shape must be > 0");
    if (shape < 1.0) {
      const double u = 1.0 - uniform01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = 1.0 - uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Order-insensitive accumulator (Kahan compensated summation), used where
/// merged partial results must agree to ~1e-12 regardless of merge order.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace ghzsim::rng
