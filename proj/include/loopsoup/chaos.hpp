#pragma once

#include <functional>
#include <vector>

#include "loopsoup/gaussfield.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/soup.hpp"

namespace loopsoup {

// Product-form chaos kernels: k_q(x_1..x_q) = (1/q!) Int a(z) prod_i c(eps_i)
// 1{z in hull_i} dz with a(z) = phi(z) <V(z)> (Poisson, sign coefficient
// sqrt(lambda)(e^{beta eps}-1) after the sqrt(lambda) scaling) or
// a(z) = phi(z) <W(z)> (Gaussian, coefficient xi eps).
struct KernelSpec {
  enum class Flavor { Poisson, Gaussian };
  Flavor flavor = Flavor::Gaussian;
  double lambda = 1.0;  // Poisson only
  double beta = 0.0;    // Poisson only
  double xi = 1.0;      // Gaussian only
};

// s12 = (1/2) sum_{eps=+-1} c1(eps) c2(eps); reduces q-fold kernel inner
// products to double quadratures against alpha(z,t)^q.
double pair_coefficient(const KernelSpec& a, const KernelSpec& b);

// Quadrature description over table points: cell centers are table indices.
struct ChaosQuad {
  std::vector<int> idx;    // table point indices of the quad cells
  double cell_area = 0.0;
  double cell_size = 0.0;
};

// Weight a(z) per quad cell for a kernel flavor (phi * one-point limit).
std::vector<double> kernel_weights(const Domain& domain, const KernelSpec& spec,
                                   const std::function<double(Point)>& phi,
                                   const ChaosQuad& quad, const AlphaTable& table);

// <k1, k2>_{L2(nu^q)} = (1/q!^2) Int Int a1(z) a2(t) [s12 alpha(z,t)]^q dz dt.
// cutoff == 0: limit kernels; the diagonal cell integrates the log law
// alpha ~ (1/5) log(1/r) + g with g taken from the nearest off-diagonal
// entry. cutoff > 0: alpha_cutoff pair masses (finite diagonal).
double kernel_inner_product(const KernelSpec& s1, const KernelSpec& s2, int q,
                            const std::vector<double>& a1, const std::vector<double>& a2,
                            const ChaosQuad& quad, const AlphaTable& table, double cutoff = 0.0);

// q! || sqrt(lambda)^q f_q - w_q ||^2 expanded bilinearly.
double kernel_gap(int q, double lambda, double beta, double xi,
                  const std::vector<double>& a_v, const std::vector<double>& a_w,
                  const ChaosQuad& quad, const AlphaTable& table);

// sum_{q=N+1..} q! ||lambda^{q/2} f_q||^2, truncated when terms fall below
// 1e-12 of the running sum. Requires lambda (e^{|beta|}-1)^2 < 5.
double tail_norm(int n_start, double lambda, double beta, const std::vector<double>& a_v,
                 const ChaosQuad& quad, const AlphaTable& table, int q_max = 64);

// Iterated difference operator of Y(eta) = e^{beta eta(h)} on a finite
// configuration: both the recursive definition and the closed product form
// Y(eta) prod_i (e^{beta h(x_i)} - 1).
double difference_operator_recursive(double beta, const std::vector<double>& eta_h,
                                     const std::vector<double>& h_at_x);
double difference_operator_product(double beta, const std::vector<double>& eta_h,
                                   const std::vector<double>& h_at_x);

}  // namespace loopsoup
