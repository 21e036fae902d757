#pragma once

#include <span>
#include <vector>

#include "loopsoup/common.hpp"
#include "loopsoup/rng.hpp"

namespace loopsoup {

// A sampled Brownian-bridge loop: closed discrete path pinned at the root at
// times 0 and t. Immutable after construction.
struct Loop {
  Point root{};
  double duration = 0.0;
  std::vector<Point> path;  // path.front() == path.back() == root
  double diameter = 0.0;    // max pairwise distance over samples

  Rect bounding_box() const {
    Rect b = Rect::around(root);
    for (const Point& p : path) b.expand(p);
    return b;
  }
};

struct MarkedLoop {
  int sign = +1;  // exactly +1 or -1
  Loop loop;
};

// Exact diameter of a point set (convex hull + rotating calipers).
double point_set_diameter(std::span<const Point> pts);

// Discrete 2-D Brownian bridge from root to root over [0, duration],
// n_steps+1 samples, exact bridge covariance, deterministic given the stream.
Loop sample_bridge(Point root, double duration, int n_steps, RngStream& rng);

// Signed winding of the closed polyline about z, plus min distance to it.
struct WindingResult {
  int winding = 0;
  double min_distance = 0.0;
};
WindingResult winding_and_distance(std::span<const Point> path, Point z);

// Winding number with a proximity guard: z closer than `guard` to the path
// raises ProximityError (caller falls back to a mask query).
int winding_number(const Loop& loop, Point z, double guard);

// Rasterized hull: the complement of the flood-filled exterior of the loop's
// path on a cell grid of size rho.
class HullMask {
 public:
  HullMask(Point origin, double cell, int nx, int ny)
      : origin_(origin), cell_(cell), nx_(nx), ny_(ny), bits_(static_cast<std::size_t>(nx) * ny, 0) {}

  bool contains(Point z) const {
    const int ix = static_cast<int>(std::floor((z.real() - origin_.real()) / cell_));
    const int iy = static_cast<int>(std::floor((z.imag() - origin_.imag()) / cell_));
    if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return false;
    return bits_[static_cast<std::size_t>(iy) * nx_ + ix] != 0;
  }

  double cell_size() const { return cell_; }
  Point origin() const { return origin_; }
  std::size_t cell_count() const;
  double area() const { return static_cast<double>(cell_count()) * cell_ * cell_; }

  std::vector<std::uint8_t>& raw() { return bits_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

 private:
  Point origin_;
  double cell_;
  int nx_, ny_;
  std::vector<std::uint8_t> bits_;
};

// Default raster resolution: max(delta/32, diameter/512) with delta the
// ambient UV cutoff, so containment error stays well below the finest
// cutoff in use.
inline double default_mask_resolution(double delta, double diameter) {
  return std::max(delta / 32.0, diameter / 512.0);
}

HullMask hull_mask(const Loop& loop, double resolution);
HullMask hull_mask(std::span<const Point> path, double resolution);

// True iff z's cell belongs to the mask. Bounding-box and winding prefilters
// only short-circuit; they never change the answer.
bool hull_contains(const Loop& loop, const HullMask& mask, Point z);

}  // namespace loopsoup
