#include "loopsoup/soup.hpp"

#include <cmath>

namespace loopsoup {

SignedSoup sample_signed_soup(const Domain& domain, const FieldParams& params,
                              const SamplerOptions& cutoffs, const Seeder& seed,
                              const std::vector<Point>& roi) {
  if (params.lambda <= 0.0) throw ConfigError("soup intensity must be positive");
  LoopSampler sampler(domain, cutoffs);
  SignedSoup soup;
  soup.lambda_ = params.lambda;
  soup.delta0_ = cutoffs.delta0;
  soup.roi_ = roi;
  QuerySet q;
  q.points = roi;
  q.keep_paths = true;
  q.roi_cull = !roi.empty();
  sampler.run(params.lambda, seed, q, [&](const LoopReport& r) {
    soup.loops_.push_back(MarkedLoop{r.sign, *r.loop});
    soup.coverage_.push_back(r.coverage);
  });
  return soup;
}

int SignedSoup::layering_number(Point z, double delta, std::optional<double> R) const {
  if (delta < delta0_ * (1.0 - 1e-12)) {
    throw ConfigError("layering query below the soup's sampling cutoff");
  }
  if (R && *R <= delta) throw ConfigError("layering query needs delta < R");
  int roi_idx = -1;
  for (std::size_t i = 0; i < roi_.size(); ++i) {
    if (dist(roi_[i], z) < 1e-12) {
      roi_idx = static_cast<int>(i);
      break;
    }
  }
  if (roi_idx < 0 && !roi_.empty()) {
    throw ConfigError("soup was sampled with an ROI; query point is outside it");
  }
  int n = 0;
  for (std::size_t i = 0; i < loops_.size(); ++i) {
    const MarkedLoop& ml = loops_[i];
    if (ml.loop.diameter < delta) continue;
    if (R && ml.loop.diameter >= *R) continue;
    bool covered;
    if (roi_idx >= 0) {
      covered = (coverage_[i] >> roi_idx) & 1;
    } else {
      const Rect box = ml.loop.bounding_box();
      if (!box.contains(z)) continue;
      const WindingResult w = winding_and_distance(ml.loop.path, z);
      const double rho = default_mask_resolution(delta0_, ml.loop.diameter);
      if (w.winding != 0 && w.min_distance > rho) {
        covered = true;
      } else {
        covered = hull_mask(ml.loop, rho).contains(z);
      }
    }
    if (covered) n += ml.sign;
  }
  return n;
}

double SignedSoup::field_value(Point z, double delta, const FieldParams& params, bool renormalize,
                               std::optional<double> R) const {
  const int n = layering_number(z, delta, R);
  const double raw = std::exp(params.beta * n);
  if (!renormalize) return raw;
  return std::pow(delta, 2.0 * params.weight()) * raw;
}

QuadGrid QuadGrid::inside(const Domain& domain, double cell) {
  if (cell <= 0.0) throw ConfigError("quadrature cell must be positive");
  QuadGrid g;
  g.cell_size = cell;
  g.cell_area = cell * cell;
  const Rect box = domain.bounding_box();
  const int nx = static_cast<int>(std::ceil(box.width() / cell));
  const int ny = static_cast<int>(std::ceil(box.height() / cell));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double cx = box.x0 + (ix + 0.5) * cell;
      const double cy = box.y0 + (iy + 0.5) * cell;
      const Point corners[4] = {Point(cx - cell / 2, cy - cell / 2),
                                Point(cx + cell / 2, cy - cell / 2),
                                Point(cx - cell / 2, cy + cell / 2),
                                Point(cx + cell / 2, cy + cell / 2)};
      bool in = true;
      for (const Point& c : corners) in = in && domain.contains(c);
      if (in) g.centers.emplace_back(cx, cy);
    }
  }
  double area = 0.0;
  switch (domain.kind()) {
    case Domain::Kind::UnitDisk:
    case Domain::Kind::MappedDisk:
      area = M_PI;
      break;
    case Domain::Kind::Square:
      area = box.area();
      break;
  }
  g.coverage_deficit = area - g.domain_area_covered();
  return g;
}

double field_integral(const SignedSoup& soup, const std::function<double(Point)>& phi,
                      const QuadGrid& grid, double delta, const FieldParams& params) {
  double sum = 0.0;
  for (const Point& c : grid.centers) {
    sum += phi(c) * soup.field_value(c, delta, params, /*renormalize=*/true);
  }
  return sum * grid.cell_area;
}

}  // namespace loopsoup
