#include "loopsoup/gaussfield.hpp"

#include <cmath>

namespace loopsoup {

CovarianceBuild covariance_matrix(const Domain& domain, const std::vector<GaussSite>& sites,
                                  const AlphaTable& table) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  CovarianceBuild out;
  out.matrix.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      const GaussSite& sa = sites[static_cast<std::size_t>(a)];
      const GaussSite& sb = sites[static_cast<std::size_t>(b)];
      const double dmax = std::max(sa.delta, sb.delta);
      Estimate e;
      if (sa.point == sb.point) {
        e = table.point_mass(sa.point, dmax);
      } else {
        const double sep =
            dist(table.points()[static_cast<std::size_t>(sa.point)],
                 table.points()[static_cast<std::size_t>(sb.point)]);
        if (sep < dmax) {
          throw ConfigError("gaussian grid spacing below the site cutoff");
        }
        e = table.pair_mass(sa.point, sb.point);
      }
      out.matrix(a, b) = e.value;
      out.matrix(b, a) = e.value;
      out.max_entry_stderr = std::max(out.max_entry_stderr, e.stderr_);
    }
  }
  (void)domain;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.matrix);
  out.min_eigenvalue = solver.eigenvalues().minCoeff();
  out.clip_tolerance = 3.0 * out.max_entry_stderr;
  if (out.min_eigenvalue < -out.clip_tolerance) {
    throw TableError("covariance matrix not PSD beyond table noise; rebuild the table");
  }
  out.transform =
      solver.eigenvectors() * solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return out;
}

GaussFieldSample sample_gaussian_field(const CovarianceBuild& cov,
                                       const std::vector<GaussSite>& sites, RngStream& rng) {
  GaussFieldSample s;
  s.sites = sites;
  Eigen::VectorXd iid(cov.transform.cols());
  for (Eigen::Index i = 0; i < iid.size(); ++i) iid(i) = rng.normal();
  s.values = cov.transform * iid;
  return s;
}

double glf_value(double g, const GaussParams& params, double delta, bool renormalize) {
  const double raw = std::exp(params.xi * g);
  if (!renormalize) return raw;
  return std::pow(delta, 2.0 * params.weight()) * raw;
}

Estimate glf_one_point_cutoff(int point, double delta, const GaussParams& params,
                              const AlphaTable& table) {
  const Estimate a = table.point_mass(point, delta);
  const double pref = std::pow(delta, 2.0 * params.weight());
  const double c = params.xi * params.xi / 2.0;
  const double v = pref * std::exp(c * a.value);
  return {v, c * v * a.stderr_, a.n};
}

Estimate glf_one_point_limit(const Domain& domain, Point z, const GaussParams& params,
                             const AlphaTable& table) {
  const int i = table.find_point(z);
  if (i < 0) throw TableError("glf_one_point_limit: point not in table");
  const Estimate a = table.anchor(i);
  const double dz = domain.boundary_distance(z);
  const double pref = std::pow(dz, 2.0 * params.weight());
  const double c = params.xi * params.xi / 2.0;
  const double v = pref * std::exp(c * a.value);
  return {v, c * v * a.stderr_, a.n};
}

Estimate glf_two_point(const Domain& domain, Point z, Point w, const GaussParams& params,
                       const AlphaTable& table) {
  const int i = table.find_point(z);
  const int j = table.find_point(w);
  if (i < 0 || j < 0) throw TableError("glf_two_point: points not in table");
  const PointPair pp(domain, z, w);
  const double c = params.xi * params.xi / 2.0;
  // Split into disjoint loop classes so the errors combine independently:
  // alpha_d(z) = alpha_d(z|w) + alpha(z,w) for d <= |z-w|.
  const Estimate xzw = table.exclusive_mass(i, j, pp.d_zw);
  const Estimate xwz = table.exclusive_mass(j, i, pp.d_wz);
  const Estimate pair = table.pair_mass(i, j);
  const double pref = std::pow(pp.d_zw * pp.d_wz, 2.0 * params.weight());
  const double log_v = c * (xzw.value + xwz.value) + 4.0 * c * pair.value;
  const double v = pref * std::exp(log_v);
  const double var_log = c * c * (xzw.stderr_ * xzw.stderr_ + xwz.stderr_ * xwz.stderr_) +
                         16.0 * c * c * pair.stderr_ * pair.stderr_;
  return {v, v * std::sqrt(var_log), std::max({xzw.n, xwz.n, pair.n})};
}

double gmc_density_factor(double g, const GaussParams& params, double alpha_delta) {
  return std::exp(params.xi * g - params.xi * params.xi / 2.0 * alpha_delta);
}

Estimate theta(const Domain& domain, Point z, const AlphaTable& table) {
  const int i = table.find_point(z);
  if (i < 0) throw TableError("theta: point not in table");
  const Estimate a = table.anchor(i);
  const double dz = domain.boundary_distance(z);
  return a + std::log(dz) / 5.0;
}

}  // namespace loopsoup
