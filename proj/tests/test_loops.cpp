#include <doctest.h>

#include <cmath>
#include <vector>

#include "loopsoup/loops.hpp"
#include "loopsoup/stats.hpp"

using namespace loopsoup;

namespace {

Loop polygon_loop(const std::vector<Point>& pts) {
  Loop l;
  l.root = pts.front();
  l.duration = 1.0;
  l.path = pts;
  l.path.push_back(pts.front());
  l.diameter = point_set_diameter(l.path);
  return l;
}

Loop circle_loop(Point center, double radius, int n, int turns = 1) {
  std::vector<Point> pts;
  for (int i = 0; i < n * turns; ++i) {
    const double th = 2.0 * M_PI * i / n;
    pts.push_back(center + std::polar(radius, th));
  }
  return polygon_loop(pts);
}

}  // namespace

TEST_CASE("bridge is pinned and has the bridge covariance") {
  Seeder seed(101);
  {
    RngStream rng(seed.child(0));
    const Loop l = sample_bridge({0.3, -0.2}, 2.5, 64, rng);
    CHECK(l.path.front() == l.path.back());
    CHECK(l.path.front() == Point{0.3, -0.2});
    CHECK(l.path.size() == 65);
  }
  // Var(path[n/2] - root) = t/4 per coordinate; the exact one-step increment
  // variance is (t/n)(1 - 1/n), which is ~ t/n once steps are short.
  MomentAccumulator mid_x, inc32_x;
  const double t = 1.7;
  const int n = 32;
  const int reps = 60000;
  for (int r = 0; r < reps; ++r) {
    RngStream rng(seed.child(1).child(static_cast<std::uint64_t>(r)));
    const Loop l = sample_bridge({0.0, 0.0}, t, n, rng);
    mid_x.add(l.path[n / 2].real());
    inc32_x.add(l.path[1].real() - l.path[0].real());
  }
  CHECK(std::abs(mid_x.variance() - t / 4.0) < 3.0 * mid_x.stderr_variance());
  CHECK(std::abs(inc32_x.variance() - (t / n) * (1.0 - 1.0 / n)) < 3.0 * inc32_x.stderr_variance());

  MomentAccumulator inc_x;
  const int n_fine = 1024;
  for (int r = 0; r < 20000; ++r) {
    RngStream rng(seed.child(2).child(static_cast<std::uint64_t>(r)));
    const Loop l = sample_bridge({0.0, 0.0}, t, n_fine, rng);
    inc_x.add(l.path[1].real() - l.path[0].real());
  }
  CHECK(std::abs(inc_x.variance() - t / n_fine) < 3.0 * inc_x.stderr_variance());
}

TEST_CASE("bridge determinism given the stream") {
  RngStream a(Seeder(7).child(3));
  RngStream b(Seeder(7).child(3));
  const Loop la = sample_bridge({0.0, 0.0}, 1.0, 128, a);
  const Loop lb = sample_bridge({0.0, 0.0}, 1.0, 128, b);
  CHECK(la.path == lb.path);
}

TEST_CASE("hull mask of a circle") {
  const Loop circle = circle_loop({0.0, 0.0}, 1.0, 64);
  const HullMask mask = hull_mask(circle, 1.0 / 64.0);
  CHECK(mask.contains({0.0, 0.0}));
  CHECK(!mask.contains({2.0, 0.0}));
  CHECK(mask.area() == doctest::Approx(M_PI).epsilon(0.05));
  CHECK(hull_contains(circle, mask, {0.99, 0.0}));
  CHECK(hull_contains(circle, mask, circle.path[5]));
  CHECK(!hull_contains(circle, mask, {1.5, 1.5}));
}

TEST_CASE("figure eight pocket agrees with a finer flood fill") {
  std::vector<Point> pts;
  const int n = 256;
  for (int i = 0; i < n; ++i) {
    const double u = 2.0 * M_PI * i / n;
    pts.emplace_back(std::sin(2.0 * u), std::sin(u));
  }
  const Loop eight = polygon_loop(pts);
  const HullMask coarse = hull_mask(eight, eight.diameter / 128.0);
  const HullMask fine = hull_mask(eight, eight.diameter / 512.0);
  const Point lobe{0.5, 0.5};
  CHECK(coarse.contains(lobe));
  CHECK(fine.contains(lobe));
  // Winding number vanishes there, so the mask is the arbiter.
  CHECK(hull_contains(eight, coarse, lobe));
}

TEST_CASE("winding numbers") {
  const Loop ccw = circle_loop({0.0, 0.0}, 1.0, 64);
  CHECK(winding_number(ccw, {0.0, 0.0}, 1e-6) == 1);
  CHECK(winding_number(ccw, {3.0, 0.0}, 1e-6) == 0);
  const Loop doubled = circle_loop({0.0, 0.0}, 1.0, 64, 2);
  CHECK(winding_number(doubled, {0.0, 0.0}, 1e-6) == 2);
  CHECK_THROWS_AS(winding_number(ccw, {1.0, 0.0}, 1e-2), ProximityError);
}

TEST_CASE("winding nonzero implies hull containment on random loops") {
  Seeder seed(33);
  for (int r = 0; r < 25; ++r) {
    RngStream rng(seed.child(static_cast<std::uint64_t>(r)));
    const Loop l = sample_bridge({0.0, 0.0}, 0.5, 512, rng);
    const HullMask mask = hull_mask(l, default_mask_resolution(0.05, l.diameter));
    const Rect box = l.bounding_box();
    for (int k = 0; k < 40; ++k) {
      const Point z(rng.uniform(box.x0, box.x1), rng.uniform(box.y0, box.y1));
      const WindingResult w = winding_and_distance(l.path, z);
      if (w.min_distance < mask.cell_size()) continue;
      if (w.winding != 0) CHECK(mask.contains(z));
    }
  }
}

TEST_CASE("refinement only grows the sampled hull") {
  // The level-n samples are a subset of the level-2n samples, so cells of the
  // coarse mask stay covered after dilating by one cell.
  Seeder seed(55);
  for (int r = 0; r < 20; ++r) {
    RngStream rng(seed.child(static_cast<std::uint64_t>(r)));
    const Loop l = sample_bridge({0.0, 0.0}, 0.3, 1024, rng);
    const double rho = l.diameter / 64.0;
    const HullMask m1 = hull_mask(l, rho);
    const HullMask m2 = hull_mask(l, rho / 2.0);
    int misses = 0, hits = 0;
    for (int k = 0; k < 300; ++k) {
      const Rect box = l.bounding_box();
      const Point z(rng.uniform(box.x0, box.x1), rng.uniform(box.y0, box.y1));
      if (!m2.contains(z)) continue;
      ++hits;
      bool near = m1.contains(z);
      for (int dx = -1; dx <= 1 && !near; ++dx) {
        for (int dy = -1; dy <= 1 && !near; ++dy) {
          near = m1.contains(z + Point(dx * rho, dy * rho));
        }
      }
      if (!near) ++misses;
    }
    CHECK(misses <= hits / 20);
  }
}

TEST_CASE("diameter is translation invariant and scales linearly") {
  RngStream rng(Seeder(77).child(0));
  Loop l = sample_bridge({0.0, 0.0}, 1.0, 256, rng);
  Loop shifted = l;
  for (Point& p : shifted.path) p += Point(3.0, -2.0);
  shifted.diameter = point_set_diameter(shifted.path);
  CHECK(shifted.diameter == doctest::Approx(l.diameter).epsilon(1e-12));
  Loop scaled = l;
  for (Point& p : scaled.path) p *= 2.5;
  scaled.diameter = point_set_diameter(scaled.path);
  CHECK(scaled.diameter == doctest::Approx(2.5 * l.diameter).epsilon(1e-12));
}
