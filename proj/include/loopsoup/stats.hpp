#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "loopsoup/common.hpp"

namespace loopsoup {

// Streaming moments (Welford), enough for mean/variance tests including the
// fourth-moment standard error of the sample variance.
class MomentAccumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    const double dn = d / static_cast<double>(n_);
    const double term = d * dn * static_cast<double>(n_ - 1);
    m4_ += term * dn * dn * static_cast<double>(n_ * n_ - 3 * n_ + 3) +
           6.0 * dn * dn * m2_ - 4.0 * dn * m3_;
    m3_ += term * dn * static_cast<double>(n_ - 2) - 3.0 * dn * m2_;
    m2_ += term;
    mean_ += dn;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stderr_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }
  // Asymptotic stderr of the sample variance: sqrt((m4 - s^4)/n).
  double stderr_variance() const {
    if (n_ < 2) return 0.0;
    const double nn = static_cast<double>(n_);
    const double s2 = m2_ / nn;
    const double mu4 = m4_ / nn;
    const double v = (mu4 - s2 * s2) / nn;
    return v > 0.0 ? std::sqrt(v) : 0.0;
  }

  Estimate mean_estimate() const { return {mean(), stderr_mean(), n_}; }
  Estimate variance_estimate() const { return {variance(), stderr_variance(), n_}; }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
};

// Regularized lower incomplete gamma P(a,x), series + continued fraction.
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Lentz continued fraction for Q(a,x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

inline double chi_squared_tail(double stat, double dof) {
  if (dof <= 0.0) return 1.0;
  return 1.0 - gamma_p(dof / 2.0, stat / 2.0);
}

// Poisson pmf over 0..n_max as a dense vector (tail below ~1e-18 dropped).
inline std::vector<double> poisson_pmf(double mean, int n_max) {
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int k = 0; k <= n_max; ++k) {
    const double lp = -mean + k * std::log(mean) - std::lgamma(k + 1.0);
    p[static_cast<std::size_t>(k)] = std::exp(lp);
  }
  return p;
}

// Skellam(mu, mu) pmf on [-n_max, n_max] by direct convolution of two
// Poisson pmfs (the difference of two independent Poisson counts).
inline std::map<int, double> skellam_pmf(double mu, int n_max) {
  const int kmax = n_max + static_cast<int>(std::ceil(10.0 * std::sqrt(mu + 1.0) + 10.0 * mu));
  const auto p = poisson_pmf(mu, kmax);
  std::map<int, double> out;
  for (int d = -n_max; d <= n_max; ++d) {
    double s = 0.0;
    for (int j = std::max(0, -d); j + d <= kmax && j <= kmax; ++j) {
      s += p[static_cast<std::size_t>(j + d)] * p[static_cast<std::size_t>(j)];
    }
    out[d] = s;
  }
  return out;
}

struct GofResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

// Pearson chi-squared against given class probabilities; classes are pooled
// greedily until each expected count reaches min_expected.
inline GofResult chi_squared_gof(const std::vector<std::uint64_t>& observed,
                                 const std::vector<double>& prob, std::uint64_t total,
                                 double min_expected = 5.0) {
  std::vector<double> exp_pooled;
  std::vector<double> obs_pooled;
  double e_acc = 0.0, o_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    e_acc += prob[i] * static_cast<double>(total);
    o_acc += static_cast<double>(observed[i]);
    if (e_acc >= min_expected) {
      exp_pooled.push_back(e_acc);
      obs_pooled.push_back(o_acc);
      e_acc = o_acc = 0.0;
    }
  }
  if (e_acc > 0.0) {
    if (exp_pooled.empty()) {
      exp_pooled.push_back(e_acc);
      obs_pooled.push_back(o_acc);
    } else {
      exp_pooled.back() += e_acc;
      obs_pooled.back() += o_acc;
    }
  }
  GofResult r;
  if (exp_pooled.size() < 2) return r;
  for (std::size_t i = 0; i < exp_pooled.size(); ++i) {
    const double d = obs_pooled[i] - exp_pooled[i];
    r.statistic += d * d / exp_pooled[i];
  }
  r.dof = static_cast<double>(exp_pooled.size() - 1);
  r.p_value = chi_squared_tail(r.statistic, r.dof);
  return r;
}

}  // namespace loopsoup
