#pragma once

#include <vector>

#include <Eigen/Dense>

#include "loopsoup/geometry.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/rng.hpp"

namespace loopsoup {

struct GaussParams {
  double xi = 1.0;

  double weight() const { return xi * xi / 20.0; }   // Delta_xi
  bool subcritical() const { return xi > 0.0 && xi < 2.0; }
  bool l2_regime() const { return xi > 0.0 && xi * xi < 2.0; }
  bool correlator_regime() const { return weight() < 0.25; }
};

// A site is the loop-set A_delta(z): the Gaussian vector below is
// G_0(A_delta_k(z_k)) jointly over sites.
struct GaussSite {
  int point = 0;  // table point index
  double delta = 0.0;
};

struct CovarianceBuild {
  Eigen::MatrixXd matrix;      // PSD-repaired
  Eigen::MatrixXd transform;   // V sqrt(clip(eigenvalues))
  double min_eigenvalue = 0.0; // before clipping
  double clip_tolerance = 0.0; // 3 x largest entry stderr
  double max_entry_stderr = 0.0;
};

// M_ab = mu(A_{delta_a}(z_a) ^ A_{delta_b}(z_b)) from the table. Negative
// eigenvalues within 3x the largest entry stderr are clipped to zero;
// anything worse is a table-quality error.
CovarianceBuild covariance_matrix(const Domain& domain, const std::vector<GaussSite>& sites,
                                  const AlphaTable& table);

struct GaussFieldSample {
  std::vector<GaussSite> sites;
  Eigen::VectorXd values;  // G_0(A_delta(z)) per site
};

// Centered multivariate normal through the symmetric-eigendecomposition
// transform; deterministic given the stream.
GaussFieldSample sample_gaussian_field(const CovarianceBuild& cov,
                                       const std::vector<GaussSite>& sites, RngStream& rng);

// e^{xi g} or delta^{2 Delta_xi} e^{xi g}.
double glf_value(double g, const GaussParams& params, double delta, bool renormalize);

// E[W~^delta(z)] = delta^{2 Delta_xi} e^{(xi^2/2) alpha_delta(z)}.
Estimate glf_one_point_cutoff(int point, double delta, const GaussParams& params,
                              const AlphaTable& table);

// <W(z)> = d_z^{2 Delta_xi} e^{(xi^2/2) alpha_{d_z}(z)}.
Estimate glf_one_point_limit(const Domain& domain, Point z, const GaussParams& params,
                             const AlphaTable& table);

// <W(z)W(w)> = (d_{z,w} d_{w,z})^{2 Delta_xi}
//              e^{(xi^2/2)(alpha_{d_{z,w}}(z) + alpha_{d_{w,z}}(w))} e^{xi^2 alpha(z,w)}.
Estimate glf_two_point(const Domain& domain, Point z, Point w, const GaussParams& params,
                       const AlphaTable& table);

// Normalized GMC density e^{xi g - (xi^2/2) alpha_delta(z)} at a site value.
double gmc_density_factor(double g, const GaussParams& params, double alpha_delta);

// Theta_D(z) = (1/5) log d_z + alpha_{d_z}(z), with propagated stderr.
Estimate theta(const Domain& domain, Point z, const AlphaTable& table);

}  // namespace loopsoup
