#pragma once

#include <cmath>
#include <cstdint>

namespace rocc {

// Splittable counter-based generator (splitmix64 output function).
// Draw i is a pure function of (key, i), so streams are reproducible and
// children derived via split() are decorrelated from the parent. All
// distribution code is hand-rolled: results are bit-stable across standard
// library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : key_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  uint64_t next_u64() {
    uint64_t z = key_ + (++ctr_) * 0x9e3779b97f4a7c15ull;
    return mix(z);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // N(0,1) via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform integer in [0, n). Rejection-free modulo bias is negligible for
  // the buffer sizes used here, but we reject anyway to keep draws exact.
  int64_t uniform_int(int64_t n) {
    const uint64_t un = static_cast<uint64_t>(n);
    const uint64_t lim = UINT64_MAX - UINT64_MAX % un;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= lim);
    return static_cast<int64_t>(x % un);
  }

  // Deterministic labeled substream: depends on (key, label) only.
  Rng split(uint64_t label) const {
    Rng child(0);
    child.key_ = mix(key_ ^ mix(label + 0xbf58476d1ce4e5b9ull));
    return child;
  }

  // Ad-hoc substream; advances this generator.
  Rng split() { return split(next_u64()); }

 private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  uint64_t key_ = 0;
  uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rocc
