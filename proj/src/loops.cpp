#include "loopsoup/loops.hpp"

#include <algorithm>
#include <cmath>

namespace loopsoup {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) -
         (a.imag() - o.imag()) * (b.real() - o.real());
}

// Andrew monotone chain.
std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Point> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double segment_distance(Point a, Point b, Point z) {
  const Point d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(z - a);
  double t = ((z.real() - a.real()) * d.real() + (z.imag() - a.imag()) * d.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

}  // namespace

double point_set_diameter(std::span<const Point> pts) {
  if (pts.size() < 2) return 0.0;
  std::vector<Point> hull = convex_hull(std::vector<Point>(pts.begin(), pts.end()));
  const std::size_t m = hull.size();
  if (m == 1) return 0.0;
  if (m == 2) return std::abs(hull[0] - hull[1]);
  // Rotating calipers.
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < m; ++i) {
    const Point edge = hull[(i + 1) % m] - hull[i];
    while (true) {
      const std::size_t jn = (j + 1) % m;
      const double adv = edge.real() * (hull[jn].imag() - hull[j].imag()) -
                         edge.imag() * (hull[jn].real() - hull[j].real());
      if (adv > 0) {
        j = jn;
      } else {
        break;
      }
    }
    best = std::max(best, std::norm(hull[i] - hull[j]));
    best = std::max(best, std::norm(hull[(i + 1) % m] - hull[j]));
  }
  return std::sqrt(best);
}

Loop sample_bridge(Point root, double duration, int n_steps, RngStream& rng) {
  if (duration <= 0.0) throw ConfigError("bridge duration must be positive");
  if (n_steps < 8) throw ConfigError("bridge needs at least 8 steps");
  Loop loop;
  loop.root = root;
  loop.duration = duration;
  loop.path.resize(static_cast<std::size_t>(n_steps) + 1);
  loop.path[0] = root;
  loop.path[static_cast<std::size_t>(n_steps)] = root;
  const double dt = duration / n_steps;
  Point x = root;
  for (int i = 1; i < n_steps; ++i) {
    // Conditional step of a bridge pinned at (root, duration):
    // X_{s+dt} | X_s ~ N(X_s + dt/(T-s) (root - X_s), dt (T-s-dt)/(T-s)).
    const double remaining = duration - (i - 1) * dt;
    const double drift = dt / remaining;
    const double var = dt * (remaining - dt) / remaining;
    const double sd = std::sqrt(std::max(var, 0.0));
    x += drift * (root - x) + Point(sd * rng.normal(), sd * rng.normal());
    loop.path[static_cast<std::size_t>(i)] = x;
  }
  loop.diameter = point_set_diameter(loop.path);
  return loop;
}

WindingResult winding_and_distance(std::span<const Point> path, Point z) {
  WindingResult r;
  double total = 0.0;
  double mind = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Point a = path[i] - z;
    const Point b = path[i + 1] - z;
    total += std::atan2(a.real() * b.imag() - a.imag() * b.real(),
                        a.real() * b.real() + a.imag() * b.imag());
    mind = std::min(mind, segment_distance(path[i], path[i + 1], z));
  }
  r.winding = static_cast<int>(std::lround(total / (2.0 * M_PI)));
  r.min_distance = mind;
  return r;
}

int winding_number(const Loop& loop, Point z, double guard) {
  const WindingResult r = winding_and_distance(loop.path, z);
  if (r.min_distance < guard) throw ProximityError("query point too close to the path");
  return r.winding;
}

HullMask hull_mask(std::span<const Point> path, double resolution) {
  Rect box = Rect::around(path[0]);
  for (const Point& p : path) box.expand(p);
  box = box.padded(2.0 * resolution);
  const int nx = static_cast<int>(std::ceil(box.width() / resolution)) + 1;
  const int ny = static_cast<int>(std::ceil(box.height() / resolution)) + 1;
  HullMask mask(Point(box.x0, box.y0), resolution, nx, ny);
  auto& bits = mask.raw();
  auto idx = [nx](int ix, int iy) { return static_cast<std::size_t>(iy) * nx + ix; };

  // Rasterize segments: grid traversal marks every crossed cell (value 2).
  auto cell_of = [&](Point p, int& ix, int& iy) {
    ix = std::clamp(static_cast<int>(std::floor((p.real() - box.x0) / resolution)), 0, nx - 1);
    iy = std::clamp(static_cast<int>(std::floor((p.imag() - box.y0) / resolution)), 0, ny - 1);
  };
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    int ix, iy, jx, jy;
    cell_of(path[i], ix, iy);
    cell_of(path[i + 1], jx, jy);
    bits[idx(ix, iy)] = 2;
    const Point d = path[i + 1] - path[i];
    const int sx = d.real() > 0 ? 1 : -1;
    const int sy = d.imag() > 0 ? 1 : -1;
    double tx = d.real() != 0.0
                    ? ((box.x0 + (ix + (sx > 0 ? 1 : 0)) * resolution) - path[i].real()) / d.real()
                    : std::numeric_limits<double>::infinity();
    double ty = d.imag() != 0.0
                    ? ((box.y0 + (iy + (sy > 0 ? 1 : 0)) * resolution) - path[i].imag()) / d.imag()
                    : std::numeric_limits<double>::infinity();
    const double dtx = d.real() != 0.0 ? resolution / std::abs(d.real())
                                       : std::numeric_limits<double>::infinity();
    const double dty = d.imag() != 0.0 ? resolution / std::abs(d.imag())
                                       : std::numeric_limits<double>::infinity();
    int steps = 0;
    while ((ix != jx || iy != jy) && steps++ < 4 * (nx + ny)) {
      if (tx < ty) {
        tx += dtx;
        ix += sx;
      } else {
        ty += dty;
        iy += sy;
      }
      if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) break;
      bits[idx(ix, iy)] = 2;
    }
  }

  // Flood-fill the exterior from the border (value 1), then keep the rest.
  std::vector<std::pair<int, int>> stack;
  auto push = [&](int ix, int iy) {
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return;
    auto& b = bits[idx(ix, iy)];
    if (b != 0) return;
    b = 1;
    stack.emplace_back(ix, iy);
  };
  for (int ix = 0; ix < nx; ++ix) {
    push(ix, 0);
    push(ix, ny - 1);
  }
  for (int iy = 0; iy < ny; ++iy) {
    push(0, iy);
    push(nx - 1, iy);
  }
  while (!stack.empty()) {
    auto [ix, iy] = stack.back();
    stack.pop_back();
    push(ix + 1, iy);
    push(ix - 1, iy);
    push(ix, iy + 1);
    push(ix, iy - 1);
  }
  for (auto& b : bits) b = (b == 1) ? 0 : 1;
  return mask;
}

HullMask hull_mask(const Loop& loop, double resolution) {
  if (resolution <= 0.0) throw ConfigError("mask resolution must be positive");
  if (loop.diameter < 2.0 * resolution)
    throw ConfigError("degenerate loop: diameter below twice the mask resolution");
  return hull_mask(std::span<const Point>(loop.path), resolution);
}

std::size_t HullMask::cell_count() const {
  std::size_t c = 0;
  for (auto b : bits_) c += b;
  return c;
}

bool hull_contains(const Loop& loop, const HullMask& mask, Point z) {
  const Rect box = loop.bounding_box();
  if (!box.contains(z)) return false;
  const WindingResult w = winding_and_distance(loop.path, z);
  if (w.winding != 0 && w.min_distance > mask.cell_size()) return true;
  return mask.contains(z);
}

}  // namespace loopsoup
