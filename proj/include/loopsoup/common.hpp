#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopsoup {

using Point = std::complex<double>;

inline double dist(Point a, Point b) { return std::abs(a - b); }

// Axis-aligned rectangle in the plane.
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(Point z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
  Rect padded(double m) const { return {x0 - m, y0 - m, x1 + m, y1 + m}; }
  // Euclidean distance from z to the rectangle (0 if inside).
  double distance(Point z) const {
    const double dx = std::max({x0 - z.real(), 0.0, z.real() - x1});
    const double dy = std::max({y0 - z.imag(), 0.0, z.imag() - y1});
    return std::hypot(dx, dy);
  }
  void expand(Point z) {
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  }
  static Rect around(Point z) { return {z.real(), z.imag(), z.real(), z.imag()}; }
};

// A stochastic scalar result. stderr == 0 marks exact/analytic values.
struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n = 0;

  Estimate() = default;
  Estimate(double v, double s, std::uint64_t count) : value(v), stderr_(s), n(count) {}
  static Estimate exact(double v) { return Estimate{v, 0.0, 0}; }

  Estimate operator+(const Estimate& o) const {
    return {value + o.value, std::hypot(stderr_, o.stderr_), std::max(n, o.n)};
  }
  Estimate operator-(const Estimate& o) const {
    return {value - o.value, std::hypot(stderr_, o.stderr_), std::max(n, o.n)};
  }
  Estimate operator+(double c) const { return {value + c, stderr_, n}; }
  Estimate operator*(double c) const { return {value * c, std::abs(c) * stderr_, n}; }
  // First-order (delta method) exponential map: e^{c * X}.
  Estimate exp_scaled(double c) const {
    const double v = std::exp(c * value);
    return {v, std::abs(c) * v * stderr_, n};
  }
  bool consistent_with(double target, double n_sigma = 3.0) const {
    return std::abs(value - target) <= n_sigma * stderr_;
  }
};

inline Estimate combine_product(const Estimate& a, const Estimate& b) {
  // Independent factors, first order.
  const double v = a.value * b.value;
  const double s = std::hypot(a.stderr_ * b.value, b.stderr_ * a.value);
  return {v, s, std::max(a.n, b.n)};
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProximityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace loopsoup
