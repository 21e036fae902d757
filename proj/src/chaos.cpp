#include "loopsoup/chaos.hpp"

#include <cmath>

namespace loopsoup {

namespace {

double factorial(int q) { return std::tgamma(static_cast<double>(q) + 1.0); }

// Radical-inverse (Halton) sequence for the deterministic diagonal-cell rule.
double radical_inverse(int base, std::uint64_t i) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
  }
  return r;
}

// Mean over cell x cell of [s ((1/5) log(1/r) + g)]^q, r = |z - t|, by a
// fixed low-discrepancy rule. The integrand has an integrable log^q
// singularity the midpoint rule would miss.
double diagonal_cell_average(double s, double g, int q, double h) {
  constexpr int kSamples = 4096;
  const int bases[4] = {2, 3, 5, 7};
  double sum = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    double u[4];
    for (int b = 0; b < 4; ++b) u[b] = radical_inverse(bases[b], static_cast<std::uint64_t>(i) + 1);
    const double dx = (u[0] - u[2]) * h;
    const double dy = (u[1] - u[3]) * h;
    const double r = std::max(std::hypot(dx, dy), 1e-14);
    const double alpha = std::max(std::log(1.0 / r) / 5.0 + g, 0.0);
    sum += std::pow(s * alpha, q);
  }
  return sum / kSamples;
}

}  // namespace

double pair_coefficient(const KernelSpec& a, const KernelSpec& b) {
  const bool ap = a.flavor == KernelSpec::Flavor::Poisson;
  const bool bp = b.flavor == KernelSpec::Flavor::Poisson;
  if (ap && bp) {
    // sqrt(l1 l2) [cosh(b1+b2) - cosh b1 - cosh b2 + 1], written through
    // cosh x - 1 = 2 sinh^2(x/2) so the small-beta cancellation stays exact.
    auto coshm1 = [](double x) {
      const double s = std::sinh(x / 2.0);
      return 2.0 * s * s;
    };
    return std::sqrt(a.lambda * b.lambda) *
           (coshm1(a.beta + b.beta) - coshm1(a.beta) - coshm1(b.beta));
  }
  if (!ap && !bp) return a.xi * b.xi;
  const KernelSpec& p = ap ? a : b;
  const KernelSpec& g = ap ? b : a;
  return std::sqrt(p.lambda) * g.xi * std::sinh(p.beta);
}

std::vector<double> kernel_weights(const Domain& domain, const KernelSpec& spec,
                                   const std::function<double(Point)>& phi,
                                   const ChaosQuad& quad, const AlphaTable& table) {
  std::vector<double> a(quad.idx.size(), 0.0);
  for (std::size_t k = 0; k < quad.idx.size(); ++k) {
    const int i = quad.idx[k];
    const Point z = table.points()[static_cast<std::size_t>(i)];
    const double dz = domain.boundary_distance(z);
    const double alpha = table.anchor(i).value;
    double w, c;
    if (spec.flavor == KernelSpec::Flavor::Poisson) {
      w = layering_weight(spec.lambda, spec.beta);
      c = 10.0 * w;
    } else {
      w = spec.xi * spec.xi / 20.0;
      c = spec.xi * spec.xi / 2.0;
    }
    a[k] = phi(z) * std::pow(dz, 2.0 * w) * std::exp(c * alpha);
  }
  return a;
}

double kernel_inner_product(const KernelSpec& s1, const KernelSpec& s2, int q,
                            const std::vector<double>& a1, const std::vector<double>& a2,
                            const ChaosQuad& quad, const AlphaTable& table, double cutoff) {
  if (q < 1) throw ConfigError("kernel order must be >= 1");
  const double s = pair_coefficient(s1, s2);
  if (s == 0.0) return 0.0;
  const std::size_t n = quad.idx.size();
  const double w2 = quad.cell_area * quad.cell_area;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      if (k == l) continue;
      const double alpha =
          cutoff > 0.0 ? table.pair_mass_cutoff(quad.idx[k], quad.idx[l], cutoff).value
                       : table.pair_mass(quad.idx[k], quad.idx[l]).value;
      sum += a1[k] * a2[l] * std::pow(s * alpha, q);
    }
  }
  // Diagonal cells.
  for (std::size_t k = 0; k < n; ++k) {
    double avg;
    if (cutoff > 0.0) {
      // Finite on the diagonal: mu(A_cutoff(z) ^ A_cutoff(z)) = alpha_cutoff(z).
      const double alpha = table.point_mass(quad.idx[k], cutoff).value;
      avg = std::pow(s * alpha, q);
    } else {
      // g from the nearest off-diagonal neighbour: alpha(z,w) = (1/5) log(1/r) + g.
      double best_sep = 1e300;
      double g = 0.0;
      const Point zk = table.points()[static_cast<std::size_t>(quad.idx[k])];
      for (std::size_t l = 0; l < n; ++l) {
        if (l == k) continue;
        const double sep = dist(zk, table.points()[static_cast<std::size_t>(quad.idx[l])]);
        if (sep < best_sep) {
          best_sep = sep;
          g = table.pair_mass(quad.idx[k], quad.idx[l]).value + std::log(sep) / 5.0;
        }
      }
      avg = diagonal_cell_average(s, g, q, quad.cell_size);
    }
    sum += a1[k] * a2[k] * avg;
  }
  const double qf = factorial(q);
  return sum * w2 / (qf * qf);
}

double kernel_gap(int q, double lambda, double beta, double xi, const std::vector<double>& a_v,
                  const std::vector<double>& a_w, const ChaosQuad& quad, const AlphaTable& table) {
  KernelSpec v{KernelSpec::Flavor::Poisson, lambda, beta, 0.0};
  KernelSpec w{KernelSpec::Flavor::Gaussian, 1.0, 0.0, xi};
  const double qf = factorial(q);
  const double vv = kernel_inner_product(v, v, q, a_v, a_v, quad, table);
  const double vw = kernel_inner_product(v, w, q, a_v, a_w, quad, table);
  const double ww = kernel_inner_product(w, w, q, a_w, a_w, quad, table);
  return qf * (vv - 2.0 * vw + ww);
}

double tail_norm(int n_start, double lambda, double beta, const std::vector<double>& a_v,
                 const ChaosQuad& quad, const AlphaTable& table, int q_max) {
  const double eta = lambda * std::pow(std::exp(std::abs(beta)) - 1.0, 2.0);
  if (eta >= 5.0) throw ConfigError("tail norm needs lambda (e^{|beta|}-1)^2 < 5");
  KernelSpec v{KernelSpec::Flavor::Poisson, lambda, beta, 0.0};
  double sum = 0.0;
  for (int q = n_start + 1; q <= q_max; ++q) {
    const double term = factorial(q) * kernel_inner_product(v, v, q, a_v, a_v, quad, table);
    sum += term;
    if (term < 1e-12 * sum) break;
  }
  return sum;
}

double difference_operator_recursive(double beta, const std::vector<double>& eta_h,
                                     const std::vector<double>& h_at_x) {
  double eta_sum = 0.0;
  for (double h : eta_h) eta_sum += h;
  if (h_at_x.empty()) return std::exp(beta * eta_sum);
  // D_{x1}(D^{q-1} Y)(eta) = (D^{q-1} Y)(eta + delta_{x1}) - (D^{q-1} Y)(eta).
  std::vector<double> rest(h_at_x.begin() + 1, h_at_x.end());
  std::vector<double> eta_plus = eta_h;
  eta_plus.push_back(h_at_x.front());
  return difference_operator_recursive(beta, eta_plus, rest) -
         difference_operator_recursive(beta, eta_h, rest);
}

double difference_operator_product(double beta, const std::vector<double>& eta_h,
                                   const std::vector<double>& h_at_x) {
  double eta_sum = 0.0;
  for (double h : eta_h) eta_sum += h;
  double prod = std::exp(beta * eta_sum);
  for (double h : h_at_x) prod *= std::exp(beta * h) - 1.0;
  return prod;
}

}  // namespace loopsoup
