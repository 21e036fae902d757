#pragma once

#include <cmath>
#include <cstdint>

namespace loopsoup {

// splitmix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

// Immutable key in a derivation tree. Children are a pure function of
// (key, tag), so replicas / candidates can be seeded in any order and in
// parallel without coordination. This is the stream(master, tag, replica)
// contract used throughout the harness.
class Seeder {
 public:
  explicit Seeder(std::uint64_t key) : key_(key) {}

  Seeder child(std::uint64_t tag) const {
    return Seeder(mix64(key_ + UINT64_C(0x9E3779B97F4A7C15) * (tag + 1)));
  }
  Seeder child(std::uint64_t a, std::uint64_t b) const { return child(a).child(b); }
  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// Sequential splitmix64 stream with the usual real-valued helpers.
// Box-Muller keeps its spare value so normal() costs one log/sqrt per pair.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}
  explicit RngStream(const Seeder& s) : state_(s.key()) {}

  std::uint64_t u64() {
    state_ += UINT64_C(0x9E3779B97F4A7C15);
    return mix64(state_);
  }

  // Uniform on (0,1); never returns 0 or 1.
  double uniform() { return (static_cast<double>(u64() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 6.283185307179586476925 * v;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // Poisson: Knuth product method for small means, Hormann's PTRS
  // transformed rejection for large ones.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
      const double l = std::exp(-mean);
      std::uint64_t k = 0;
      double p = uniform();
      while (p > l) {
        ++k;
        p *= uniform();
      }
      return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          k * loglam - mean - std::lgamma(k + 1.0)) {
        return static_cast<std::uint64_t>(k);
      }
    }
  }

  int sign() { return (u64() & 1) ? 1 : -1; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace loopsoup
