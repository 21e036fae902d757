#include "loopsoup/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace loopsoup {

namespace {

constexpr std::uint64_t kCountTag = 0;
constexpr std::uint64_t kCandidateTag = 1;

enum class PointState : std::uint8_t { Undecided, In, Out };

// High-probability bound on the sup distance between the continuous bridge
// and its n-point polyline: sqrt((t/n) ln(4n/p_tail)).
double refinement_margin(double t, int n, double p_tail) {
  return std::sqrt(t / n * std::log(4.0 * n / p_tail));
}

int round_up_pow2_multiple(int base, int value) {
  int n = base;
  while (n < value) n *= 2;
  return n;
}

// Smallest dyadic step count satisfying sqrt(t/n * 2 ln n) <= rho/2,
// clamped to [min_steps, max_steps].
int rule_steps(double t, double rho, const SamplerOptions& opt) {
  int n = opt.min_steps;
  while (n < opt.max_steps &&
         std::sqrt(t / n * 2.0 * std::log(static_cast<double>(n))) > rho / 2.0) {
    n *= 2;
  }
  return round_up_pow2_multiple(opt.coarse_steps, n);
}

struct Candidate {
  Point root;
  double t = 0.0;
  int sign = +1;
  std::vector<Point> path;  // current refinement level, n+1 samples
  int n = 0;

  Rect bbox;
  double min_clearance = 0.0;
  bool inside_domain_decided = false;

  double diam_lo = 0.0;
  bool diam_decided = false;
  bool diam_exact = false;
  std::uint32_t diam_index = 0;

  std::vector<PointState> state;
  std::vector<double> point_min_dist;
  std::vector<double> maxdist;  // per watched point, over samples
};

// Exterior test on a fattened raster of the current polyline: points whose
// cell floods from the border cannot lie in the hull of any refinement that
// stays within the margin tube.
void bay_test(const std::vector<Point>& path, double margin, std::span<const Point> pts,
              std::span<PointState> state, std::span<const double> min_dist) {
  const double cell = margin / 2.0;
  Rect box = Rect::around(path[0]);
  for (const Point& p : path) box.expand(p);
  box = box.padded(8.0 * cell);
  const int nx = static_cast<int>(std::ceil(box.width() / cell)) + 1;
  const int ny = static_cast<int>(std::ceil(box.height() / cell)) + 1;
  if (static_cast<long long>(nx) * ny > 4'000'000LL) return;  // not worth it
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(nx) * ny, 0);
  auto idx = [nx](int ix, int iy) { return static_cast<std::size_t>(iy) * nx + ix; };
  auto cell_of = [&](Point p) {
    const int ix = std::clamp(static_cast<int>((p.real() - box.x0) / cell), 0, nx - 1);
    const int iy = std::clamp(static_cast<int>((p.imag() - box.y0) / cell), 0, ny - 1);
    return std::pair<int, int>{ix, iy};
  };
  // Mark cells near the polyline: sample each segment at sub-cell spacing and
  // stamp a 3-ring neighborhood (covers the margin tube conservatively).
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Point a = path[i], b = path[i + 1];
    const double len = std::abs(b - a);
    const int nsub = std::max(1, static_cast<int>(std::ceil(len / (cell * 0.9))));
    for (int s = 0; s <= nsub; ++s) {
      const Point p = a + (b - a) * (static_cast<double>(s) / nsub);
      auto [ix, iy] = cell_of(p);
      for (int dy = -3; dy <= 3; ++dy) {
        for (int dx = -3; dx <= 3; ++dx) {
          const int jx = ix + dx, jy = iy + dy;
          if (jx >= 0 && jy >= 0 && jx < nx && jy < ny) grid[idx(jx, jy)] = 1;
        }
      }
    }
  }
  // Flood the exterior.
  std::vector<std::pair<int, int>> stack;
  auto push = [&](int ix, int iy) {
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return;
    auto& g = grid[idx(ix, iy)];
    if (g != 0) return;
    g = 2;
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
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (state[i] != PointState::Undecided) continue;
    if (min_dist[i] <= 4.0 * margin) continue;
    if (!box.contains(pts[i])) {
      state[i] = PointState::Out;
      continue;
    }
    auto [ix, iy] = cell_of(pts[i]);
    if (grid[idx(ix, iy)] == 2) state[i] = PointState::Out;
  }
}

}  // namespace

LoopSampler::LoopSampler(const Domain& domain, SamplerOptions opt)
    : domain_(domain), opt_(opt), box_(domain.bounding_box()) {
  if (opt_.delta0 <= 0.0) throw ConfigError("sampler UV cutoff must be positive");
  const double area = box_.area();
  const double d2 = opt_.delta0 * opt_.delta0;
  if (opt_.t_min_override) {
    t_min_ = *opt_.t_min_override;
  } else {
    const double eps_prime = std::sqrt(opt_.eps_mass * M_PI * d2 / (32.0 * area));
    t_min_ = d2 / (8.0 * std::log(1.0 / eps_prime));
  }
  t_max_ = opt_.t_max_override.value_or(domain.diameter() * domain.diameter());
  if (!(t_min_ > 0.0 && t_min_ < t_max_)) throw ConfigError("invalid duration truncation");

  bias_.uv_missed = 16.0 * area / (M_PI * d2) * std::exp(-d2 / (4.0 * t_min_));
  const double side = std::max(box_.width(), box_.height());
  bias_.ir_missed = 4.001 * area / (M_PI * M_PI * t_max_) *
                    std::exp(-M_PI * M_PI * t_max_ / (side * side));
  if (bias_.total() > opt_.eps_mass) {
    throw ConfigError("truncation bias bound exceeds eps_mass; tighten t_min/t_max");
  }
  lambda_mass_ = area / (2.0 * M_PI) * (1.0 / t_min_ - 1.0 / t_max_);
}

void LoopSampler::run(double intensity, const Seeder& seed, const QuerySet& q,
                      const LoopSink& sink) const {
  if (q.points.size() > 64) throw ConfigError("query set supports at most 64 points");
  for (std::size_t i = 1; i < q.diam_thresholds.size(); ++i) {
    if (q.diam_thresholds[i] < q.diam_thresholds[i - 1])
      throw ConfigError("diameter thresholds must be sorted");
  }

  RngStream meta(seed.child(kCountTag));
  const std::uint64_t n_candidates = meta.poisson(intensity * lambda_mass_);
  const Seeder cand_base = seed.child(kCandidateTag);

  Candidate c;
  Loop out_loop;
  std::vector<std::uint8_t> ball_scratch(q.points.size(), 0);

  const double dmax_factor = 2.0 * std::sqrt(std::log(8.0 / opt_.p_tail));

  for (std::uint64_t k = 0; k < n_candidates; ++k) {
    RngStream rng(cand_base.child(k));
    const Point root(rng.uniform(box_.x0, box_.x1), rng.uniform(box_.y0, box_.y1));
    const double u = rng.uniform();
    const double t = 1.0 / (1.0 / t_min_ - u * (1.0 / t_min_ - 1.0 / t_max_));
    const int sign = rng.sign();
    if (!domain_.contains(root)) continue;

    const double dmax = dmax_factor * std::sqrt(t);
    if (dmax < opt_.delta0) continue;
    if (q.roi_cull && !q.points.empty()) {
      double mind = std::numeric_limits<double>::infinity();
      for (const Point& p : q.points) mind = std::min(mind, dist(root, p));
      if (mind > dmax) continue;
    }

    // --- sample the coarse skeleton ---
    c.root = root;
    c.t = t;
    c.sign = sign;
    c.n = opt_.coarse_steps;
    c.path.assign(static_cast<std::size_t>(c.n) + 1, root);
    {
      const double dt = t / c.n;
      Point x = root;
      bool dead = false;
      for (int i = 1; i < c.n && !dead; ++i) {
        const double remaining = t - (i - 1) * dt;
        const double sd = std::sqrt(std::max(dt * (remaining - dt) / remaining, 0.0));
        x += (dt / remaining) * (root - x) + Point(sd * rng.normal(), sd * rng.normal());
        c.path[static_cast<std::size_t>(i)] = x;
        if (!domain_.contains(x)) dead = true;
      }
      if (dead) continue;
    }

    c.bbox = Rect::around(root);
    c.min_clearance = domain_.clearance(root);
    for (const Point& p : c.path) {
      c.bbox.expand(p);
      c.min_clearance = std::min(c.min_clearance, domain_.clearance(p));
    }
    c.inside_domain_decided = false;
    c.diam_decided = false;
    c.diam_exact = false;
    c.diam_index = 0;
    c.diam_lo = 0.0;
    c.state.assign(q.points.size(), PointState::Undecided);
    c.point_min_dist.assign(q.points.size(), 0.0);
    const bool track_maxdist = !q.ball_thresholds.empty();
    c.maxdist.assign(q.points.size(), 0.0);
    if (track_maxdist) {
      for (std::size_t i = 0; i < q.points.size(); ++i) {
        double m = 0.0;
        for (const Point& p : c.path) m = std::max(m, std::norm(p - q.points[i]));
        c.maxdist[i] = std::sqrt(m);
      }
    }

    bool dead = false;
    bool emitted = false;
    while (!dead && !emitted) {
      const double margin = refinement_margin(c.t, c.n, opt_.p_tail);
      const int n_final = rule_steps(
          c.t, default_mask_resolution(opt_.delta0, std::max(c.diam_lo, opt_.delta0)), opt_);
      const bool final_level = c.n >= n_final;

      if (!c.inside_domain_decided && c.min_clearance > margin) c.inside_domain_decided = true;

      // Diameter against delta0 and the threshold ladder.
      if (!c.diam_decided || final_level) {
        c.diam_lo = point_set_diameter(c.path);
        const double up = c.diam_lo + 2.0 * margin;
        if (!final_level && up < opt_.delta0) {
          dead = true;
          break;
        }
        if (final_level) {
          if (c.diam_lo < opt_.delta0) {
            dead = true;
            break;
          }
          c.diam_decided = true;
          c.diam_exact = true;
          c.diam_index = static_cast<std::uint32_t>(
              std::upper_bound(q.diam_thresholds.begin(), q.diam_thresholds.end(), c.diam_lo) -
              q.diam_thresholds.begin());
        } else if (c.diam_lo >= opt_.delta0) {
          const auto lo_it =
              std::upper_bound(q.diam_thresholds.begin(), q.diam_thresholds.end(), c.diam_lo);
          const auto up_it =
              std::upper_bound(q.diam_thresholds.begin(), q.diam_thresholds.end(), up);
          if (lo_it == up_it) {
            c.diam_decided = true;
            c.diam_index = static_cast<std::uint32_t>(lo_it - q.diam_thresholds.begin());
          }
        }
      }

      // Per-point containment.
      std::size_t undecided = 0;
      bool any_far_pocket = false;
      for (std::size_t i = 0; i < q.points.size(); ++i) {
        if (c.state[i] != PointState::Undecided) continue;
        const Point p = q.points[i];
        if (c.bbox.distance(p) > margin) {
          c.state[i] = PointState::Out;
          continue;
        }
        const WindingResult w = winding_and_distance(c.path, p);
        c.point_min_dist[i] = w.min_distance;
        if (w.min_distance > margin && w.winding != 0) {
          c.state[i] = PointState::In;
          continue;
        }
        if (final_level) {
          // Definition-level answer: raster mask of the rule-level path.
          const double rho = default_mask_resolution(opt_.delta0, c.diam_lo);
          const HullMask mask = hull_mask(std::span<const Point>(c.path), rho);
          for (std::size_t j = i; j < q.points.size(); ++j) {
            if (c.state[j] != PointState::Undecided) continue;
            c.state[j] = mask.contains(q.points[j]) ? PointState::In : PointState::Out;
          }
          break;
        }
        ++undecided;
        if (w.winding == 0 && w.min_distance > 4.0 * margin) any_far_pocket = true;
      }
      if (any_far_pocket && c.n >= 64) {
        bay_test(c.path, margin, q.points, c.state, c.point_min_dist);
        undecided = 0;
        for (const auto s : c.state) undecided += (s == PointState::Undecided) ? 1 : 0;
      }

      if (q.roi_cull && !q.points.empty()) {
        bool any_in_possible = false;
        for (const auto s : c.state) {
          if (s != PointState::Out) {
            any_in_possible = true;
            break;
          }
        }
        if (!any_in_possible) {
          dead = true;
          break;
        }
      }

      // Ball classes: need maxdist decided against every ball threshold for
      // points that may end up covered.
      bool ball_pending = false;
      if (!q.ball_thresholds.empty()) {
        for (std::size_t i = 0; i < q.points.size() && !ball_pending; ++i) {
          if (c.state[i] == PointState::Out) continue;
          const double lo = c.maxdist[i];
          const double up = lo + margin;
          for (const double thr : q.ball_thresholds) {
            if (thr > lo && thr <= up) {
              ball_pending = true;
              break;
            }
          }
        }
      }

      const bool all_points_done = undecided == 0;
      const bool can_finish_early = !q.keep_paths && c.inside_domain_decided && c.diam_decided &&
                                    all_points_done && !ball_pending;

      if (final_level || can_finish_early) {
        if (!c.inside_domain_decided && !final_level) {
          // unreachable: can_finish_early requires the decision
        }
        LoopReport r;
        r.sign = c.sign;
        r.duration = c.t;
        r.diameter = c.diam_lo;
        r.diameter_exact = c.diam_exact;
        r.diam_index = c.diam_index;
        r.coverage = 0;
        for (std::size_t i = 0; i < q.points.size(); ++i) {
          if (c.state[i] == PointState::In) r.coverage |= (std::uint64_t{1} << i);
          const double* beg = q.ball_thresholds.data();
          ball_scratch[i] = static_cast<std::uint8_t>(
              std::upper_bound(beg, beg + q.ball_thresholds.size(), c.maxdist[i]) - beg);
        }
        r.ball_class = std::span<const std::uint8_t>(ball_scratch.data(), q.points.size());
        if (q.keep_paths) {
          out_loop.root = c.root;
          out_loop.duration = c.t;
          out_loop.path = c.path;
          out_loop.diameter = c.diam_lo;
          r.loop = &out_loop;
        }
        sink(r);
        emitted = true;
        break;
      }

      // --- refine one level: conditional midpoints ---
      const int n2 = c.n * 2;
      std::vector<Point> next(static_cast<std::size_t>(n2) + 1);
      const double tau = c.t / c.n;
      const double sd = std::sqrt(tau / 4.0);
      for (int i = 0; i < c.n; ++i) {
        const Point a = c.path[static_cast<std::size_t>(i)];
        const Point b = c.path[static_cast<std::size_t>(i) + 1];
        next[static_cast<std::size_t>(2 * i)] = a;
        const Point mid = 0.5 * (a + b) + Point(sd * rng.normal(), sd * rng.normal());
        next[static_cast<std::size_t>(2 * i) + 1] = mid;
        if (!domain_.contains(mid)) {
          dead = true;
          break;
        }
        c.bbox.expand(mid);
        c.min_clearance = std::min(c.min_clearance, domain_.clearance(mid));
        if (track_maxdist) {
          for (std::size_t j = 0; j < q.points.size(); ++j) {
            c.maxdist[j] = std::max(c.maxdist[j], std::abs(mid - q.points[j]));
          }
        }
      }
      if (dead) break;
      next[static_cast<std::size_t>(n2)] = c.root;
      c.path.swap(next);
      c.n = n2;
    }
  }
}

}  // namespace loopsoup
