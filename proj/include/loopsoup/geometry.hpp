#pragma once

#include <string>
#include <vector>

#include "loopsoup/common.hpp"

namespace loopsoup {

// Planar conformal maps from a closed catalog: identity, Mobius disk
// automorphisms z -> (z-a)/(1 - conj(a) z) with |a| < 1, and the Cayley map
// z -> i(1+z)/(1-z) onto the upper half-plane. Maps compose into stage
// chains; the derivative modulus at a chain is the product of stage moduli.
class ConformalMap {
 public:
  enum class Kind { Identity, Mobius, Cayley };

  static ConformalMap identity() { return ConformalMap{}; }
  static ConformalMap mobius(Point a) {
    if (std::abs(a) >= 1.0) throw ConfigError("mobius parameter must satisfy |a| < 1");
    ConformalMap m;
    m.stages_.push_back({Kind::Mobius, a});
    return m;
  }
  static ConformalMap cayley() {
    ConformalMap m;
    m.stages_.push_back({Kind::Cayley, Point{}});
    return m;
  }
  static ConformalMap compose(const ConformalMap& outer, const ConformalMap& inner) {
    ConformalMap m = inner;
    m.stages_.insert(m.stages_.end(), outer.stages_.begin(), outer.stages_.end());
    return m;
  }

  Point operator()(Point z) const {
    for (const auto& s : stages_) z = apply(s, z);
    return z;
  }

  double derivative_modulus(Point z) const {
    double mod = 1.0;
    for (const auto& s : stages_) {
      mod *= stage_derivative_modulus(s, z);
      z = apply(s, z);
    }
    return mod;
  }

  bool is_identity() const { return stages_.empty(); }

 private:
  struct Stage {
    Kind kind;
    Point a;
  };

  static Point apply(const Stage& s, Point z) {
    switch (s.kind) {
      case Kind::Identity:
        return z;
      case Kind::Mobius:
        return (z - s.a) / (1.0 - std::conj(s.a) * z);
      case Kind::Cayley:
        return Point{0.0, 1.0} * (1.0 + z) / (1.0 - z);
    }
    return z;
  }

  static double stage_derivative_modulus(const Stage& s, Point z) {
    switch (s.kind) {
      case Kind::Identity:
        return 1.0;
      case Kind::Mobius: {
        const double num = 1.0 - std::norm(s.a);
        return num / std::norm(1.0 - std::conj(s.a) * z);
      }
      case Kind::Cayley:
        return 2.0 / std::norm(1.0 - z);
    }
    return 1.0;
  }

  std::vector<Stage> stages_;
};

// Sampling domains: unit disk, axis-aligned square, or the disk carrying a
// registered automorphism (same point set, used by the conformal-covariance
// experiments). Membership and boundary distance are exact.
class Domain {
 public:
  enum class Kind { UnitDisk, Square, MappedDisk };

  static Domain unit_disk() { return Domain(Kind::UnitDisk, Point{}, 2.0, ConformalMap::identity()); }
  static Domain square(Point center, double side) {
    if (side <= 0.0) throw ConfigError("square side must be positive");
    return Domain(Kind::Square, center, side, ConformalMap::identity());
  }
  static Domain mapped_disk(const ConformalMap& map) {
    return Domain(Kind::MappedDisk, Point{}, 2.0, map);
  }

  Kind kind() const { return kind_; }
  const ConformalMap& map() const { return map_; }

  bool contains(Point z) const {
    switch (kind_) {
      case Kind::UnitDisk:
      case Kind::MappedDisk:
        return std::norm(z) < 1.0;
      case Kind::Square:
        return std::abs(z.real() - center_.real()) < side_ / 2.0 &&
               std::abs(z.imag() - center_.imag()) < side_ / 2.0;
    }
    return false;
  }

  double boundary_distance(Point z) const {
    if (!contains(z)) throw DomainError("point outside domain");
    switch (kind_) {
      case Kind::UnitDisk:
      case Kind::MappedDisk:
        return 1.0 - std::abs(z);
      case Kind::Square:
        return side_ / 2.0 -
               std::max(std::abs(z.real() - center_.real()), std::abs(z.imag() - center_.imag()));
    }
    return 0.0;
  }

  // Signed clearance: boundary_distance inside, 0 on/outside. Used by the
  // sampler, which must not throw on rejected points.
  double clearance(Point z) const {
    if (!contains(z)) return 0.0;
    return boundary_distance(z);
  }

  Rect bounding_box() const {
    switch (kind_) {
      case Kind::UnitDisk:
      case Kind::MappedDisk:
        return {-1.0, -1.0, 1.0, 1.0};
      case Kind::Square:
        return {center_.real() - side_ / 2.0, center_.imag() - side_ / 2.0,
                center_.real() + side_ / 2.0, center_.imag() + side_ / 2.0};
    }
    return {};
  }

  double diameter() const {
    switch (kind_) {
      case Kind::UnitDisk:
      case Kind::MappedDisk:
        return 2.0;
      case Kind::Square:
        return side_ * std::sqrt(2.0);
    }
    return 0.0;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::UnitDisk:
        return "unit_disk";
      case Kind::Square:
        return "square";
      case Kind::MappedDisk:
        return "mapped_disk";
    }
    return "?";
  }

 private:
  Domain(Kind k, Point c, double side, ConformalMap m)
      : kind_(k), center_(c), side_(k == Kind::Square ? side : 0.0), map_(std::move(m)) {}

  Kind kind_;
  Point center_;
  double side_;
  ConformalMap map_;
};

inline double boundary_distance(const Domain& d, Point z) { return d.boundary_distance(z); }

inline double mobius_derivative_modulus(Point a, Point z) {
  if (std::abs(a) >= 1.0) throw ConfigError("mobius parameter must satisfy |a| < 1");
  return (1.0 - std::norm(a)) / std::norm(1.0 - std::conj(a) * z);
}

// The pair distances d_{z,w} = |z-w| ^ d_z and d_{w,z} = |z-w| ^ d_w that
// appear in every two-point formula.
struct PointPair {
  Point z, w;
  double d_zw = 0.0, d_wz = 0.0;

  PointPair(const Domain& domain, Point z_, Point w_) : z(z_), w(w_) {
    const double sep = dist(z_, w_);
    d_zw = std::min(sep, domain.boundary_distance(z_));
    d_wz = std::min(sep, domain.boundary_distance(w_));
  }
};

}  // namespace loopsoup
