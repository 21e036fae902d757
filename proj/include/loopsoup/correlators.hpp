#pragma once

#include <vector>

#include "loopsoup/geometry.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/soup.hpp"

namespace loopsoup {

// Points with per-point exponents; m is the smallest of all pairwise and
// boundary distances (the scale entering the n-point formula).
struct NPointSpec {
  std::vector<Point> points;
  std::vector<double> betas;

  double scale(const Domain& domain) const;  // m > 0 enforced
};

// <V_beta(z)> = d_z^{2 Delta} exp(10 Delta alpha_{d_z}(z)).
Estimate one_point_limit(const Domain& domain, Point z, const FieldParams& params,
                         const AlphaTable& table);

// E[V^delta_beta(z) V^delta'_beta'(w)] for delta, delta' < |z-w|.
Estimate two_point_cutoff(const Domain& domain, Point z, Point w, double delta, double delta_p,
                          double beta, double beta_p, double lambda, const AlphaTable& table);

// <V_beta(z) V_beta(w)> =
//   (d_{z,w} d_{w,z})^{2 Delta(beta)} e^{10 Delta(2beta) alpha(z,w)}
//   e^{10 Delta(beta) alpha_{d_{z,w}}(z|w)} e^{10 Delta(beta) alpha_{d_{w,z}}(w|z)}.
Estimate two_point_limit(const Domain& domain, Point z, Point w, const FieldParams& params,
                         const AlphaTable& table);

// phi_D(z_1..z_n; beta) from exact-cover pattern masses (group registered in
// the table over exactly these points, in order).
Estimate n_point_limit(const Domain& domain, const NPointSpec& spec, const AlphaTable& table,
                       int group_id, double lambda);

struct ConformalCheckReport {
  Estimate original;   // phi_D(z)
  Estimate mapped;     // phi_D(f(z))
  Estimate ratio;      // mapped / original
  double predicted = 0.0;  // prod |f'(z_j)|^{2 Delta(beta_j)}
};

ConformalCheckReport conformal_covariance_check(const ConformalMap& map, const Domain& domain,
                                                const NPointSpec& spec, const AlphaTable& table,
                                                int group_original, int group_mapped,
                                                double lambda);

}  // namespace loopsoup
