#include "loopsoup/correlators.hpp"

#include <cmath>

namespace loopsoup {

namespace {

// exp(c * X) with first-order error propagation, times a fixed prefactor.
Estimate exp_of(double prefactor, double c, const Estimate& x) {
  const double v = prefactor * std::exp(c * x.value);
  return {v, std::abs(c) * v * x.stderr_, x.n};
}

// Product of independent factors exp(c_k X_k), all sharing prefactor.
Estimate exp_product(double prefactor, const std::vector<std::pair<double, Estimate>>& terms) {
  double log_v = std::log(prefactor);
  double var_log = 0.0;
  std::uint64_t n = 0;
  for (const auto& [c, x] : terms) {
    log_v += c * x.value;
    var_log += c * c * x.stderr_ * x.stderr_;
    n = std::max(n, x.n);
  }
  const double v = std::exp(log_v);
  return {v, v * std::sqrt(var_log), n};
}

}  // namespace

double NPointSpec::scale(const Domain& domain) const {
  if (points.empty() || points.size() != betas.size())
    throw ConfigError("n-point spec needs matching points and betas");
  double m = domain.diameter();
  for (std::size_t i = 0; i < points.size(); ++i) {
    m = std::min(m, domain.boundary_distance(points[i]));
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double sep = dist(points[i], points[j]);
      if (sep <= 0.0) throw ConfigError("n-point spec points must be distinct");
      m = std::min(m, sep);
    }
  }
  return m;
}

Estimate one_point_limit(const Domain& domain, Point z, const FieldParams& params,
                         const AlphaTable& table) {
  const int i = table.find_point(z);
  if (i < 0) throw TableError("one_point_limit: point not in table");
  const double dz = domain.boundary_distance(z);
  const double w = params.weight();
  return exp_of(std::pow(dz, 2.0 * w), 10.0 * w, table.anchor(i));
}

Estimate two_point_cutoff(const Domain& domain, Point z, Point w, double delta, double delta_p,
                          double beta, double beta_p, double lambda, const AlphaTable& table) {
  const double sep = dist(z, w);
  if (delta >= sep || delta_p >= sep)
    throw ConfigError("two_point_cutoff needs delta, delta' < |z-w|");
  (void)domain;
  const int i = table.find_point(z);
  const int j = table.find_point(w);
  if (i < 0 || j < 0) throw TableError("two_point_cutoff: points not in table");
  // Disjoint loop classes, so the three estimates are independent.
  return exp_product(1.0, {{lambda * (std::cosh(beta) - 1.0), table.exclusive_mass(i, j, delta)},
                           {lambda * (std::cosh(beta + beta_p) - 1.0), table.pair_mass(i, j)},
                           {lambda * (std::cosh(beta_p) - 1.0), table.exclusive_mass(j, i, delta_p)}});
}

Estimate two_point_limit(const Domain& domain, Point z, Point w, const FieldParams& params,
                         const AlphaTable& table) {
  const PointPair pp(domain, z, w);
  const int i = table.find_point(z);
  const int j = table.find_point(w);
  if (i < 0 || j < 0) throw TableError("two_point_limit: points not in table");
  const double wt = params.weight();
  const double wt2 = params.weight2();
  const double prefactor = std::pow(pp.d_zw * pp.d_wz, 2.0 * wt);
  return exp_product(prefactor, {{10.0 * wt2, table.pair_mass(i, j)},
                                 {10.0 * wt, table.exclusive_mass(i, j, pp.d_zw)},
                                 {10.0 * wt, table.exclusive_mass(j, i, pp.d_wz)}});
}

Estimate n_point_limit(const Domain& domain, const NPointSpec& spec, const AlphaTable& table,
                       int group_id, double lambda) {
  const PatternGroup& g = table.pattern_group(group_id);
  if (g.point_idx.size() != spec.points.size())
    throw TableError("pattern group size does not match spec");
  const double m = spec.scale(domain);
  double sum_w = 0.0;
  std::vector<std::pair<double, Estimate>> terms;
  const std::uint64_t n_masks = std::uint64_t{1} << spec.points.size();
  for (std::uint64_t mask = 1; mask < n_masks; ++mask) {
    double beta_sum = 0.0;
    for (std::size_t b = 0; b < spec.points.size(); ++b) {
      if (mask >> b & 1) beta_sum += spec.betas[b];
    }
    const auto it = g.entries.find(mask);
    if (it == g.entries.end()) throw TableError("missing pattern mass");
    terms.emplace_back(10.0 * layering_weight(lambda, beta_sum), it->second);
  }
  for (double b : spec.betas) sum_w += layering_weight(lambda, b);
  return exp_product(std::pow(m, 2.0 * sum_w), terms);
}

ConformalCheckReport conformal_covariance_check(const ConformalMap& map, const Domain& domain,
                                                const NPointSpec& spec, const AlphaTable& table,
                                                int group_original, int group_mapped,
                                                double lambda) {
  NPointSpec mapped = spec;
  for (Point& p : mapped.points) p = map(p);
  for (std::size_t i = 0; i < mapped.points.size(); ++i) {
    if (!domain.contains(mapped.points[i])) throw DomainError("mapped point left the domain");
    for (std::size_t j = i + 1; j < mapped.points.size(); ++j) {
      if (dist(mapped.points[i], mapped.points[j]) <= 0.0)
        throw ConfigError("mapped configuration degenerate");
    }
  }
  ConformalCheckReport rep;
  rep.original = n_point_limit(domain, spec, table, group_original, lambda);
  rep.mapped = n_point_limit(domain, mapped, table, group_mapped, lambda);
  const double v = rep.mapped.value / rep.original.value;
  const double rel = std::hypot(rep.mapped.stderr_ / rep.mapped.value,
                                rep.original.stderr_ / rep.original.value);
  rep.ratio = Estimate{v, std::abs(v) * rel, std::max(rep.original.n, rep.mapped.n)};
  rep.predicted = 1.0;
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    rep.predicted *= std::pow(map.derivative_modulus(spec.points[i]),
                              2.0 * layering_weight(lambda, spec.betas[i]));
  }
  if (map.is_identity()) rep.predicted = 1.0;
  return rep;
}

}  // namespace loopsoup
