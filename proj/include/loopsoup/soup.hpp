#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "loopsoup/geometry.hpp"
#include "loopsoup/loops.hpp"
#include "loopsoup/sampler.hpp"

namespace loopsoup {

// Delta(lambda, beta) = (lambda/10)(cosh(beta) - 1), the renormalization
// exponent of the layering field. Always >= 0.
inline double layering_weight(double lambda, double beta) {
  return lambda / 10.0 * (std::cosh(beta) - 1.0);
}

struct FieldParams {
  double lambda = 1.0;
  double beta = 0.0;

  double weight() const { return layering_weight(lambda, beta); }
  double weight2() const { return layering_weight(lambda, 2.0 * beta); }
  // Theorem hypothesis for the delta -> 0 limit field.
  bool limit_regime_ok() const { return weight2() < 1.0; }
};

// One realization of the signed Brownian loop soup. When sampled with an ROI
// the loop list only retains loops that cover at least one ROI point, and
// containment answers are precomputed for those points.
class SignedSoup {
 public:
  const std::vector<MarkedLoop>& loops() const { return loops_; }
  double lambda() const { return lambda_; }
  double delta0() const { return delta0_; }
  const std::vector<Point>& roi() const { return roi_; }
  std::uint64_t coverage(std::size_t loop_index) const { return coverage_[loop_index]; }

  // Signed count of loops with diameter in [delta, R) covering z.
  int layering_number(Point z, double delta, std::optional<double> R = std::nullopt) const;

  double field_value(Point z, double delta, const FieldParams& params, bool renormalize,
                     std::optional<double> R = std::nullopt) const;

 private:
  friend SignedSoup sample_signed_soup(const Domain&, const FieldParams&, const SamplerOptions&,
                                       const Seeder&, const std::vector<Point>&);
  std::vector<MarkedLoop> loops_;
  std::vector<std::uint64_t> coverage_;
  std::vector<Point> roi_;
  double lambda_ = 0.0;
  double delta0_ = 0.0;
};

// Poisson number of candidates with mean lambda * candidate mass, thinned by
// trace-in-domain and diameter >= delta0; independent fair signs. With a
// non-empty roi, loops covering no roi point are dropped.
SignedSoup sample_signed_soup(const Domain& domain, const FieldParams& params,
                              const SamplerOptions& cutoffs, const Seeder& seed,
                              const std::vector<Point>& roi = {});

// Uniform midpoint quadrature grid over the cells fully inside the domain.
// Boundary cells are dropped; their measure is the coverage deficit.
struct QuadGrid {
  std::vector<Point> centers;
  double cell_size = 0.0;
  double cell_area = 0.0;
  double coverage_deficit = 0.0;  // |D| - covered area

  static QuadGrid inside(const Domain& domain, double cell);
  double domain_area_covered() const {
    return static_cast<double>(centers.size()) * cell_area;
  }
};

// Midpoint quadrature of the renormalized field against phi.
double field_integral(const SignedSoup& soup, const std::function<double(Point)>& phi,
                      const QuadGrid& grid, double delta, const FieldParams& params);

}  // namespace loopsoup
