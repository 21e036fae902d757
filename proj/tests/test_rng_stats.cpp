#include <doctest.h>

#include <cmath>
#include <map>

#include "loopsoup/rng.hpp"
#include "loopsoup/stats.hpp"

using namespace loopsoup;

TEST_CASE("seeder derivations are order-free and stable") {
  Seeder root(42);
  CHECK(root.child(3).key() == Seeder(42).child(3).key());
  CHECK(root.child(3).key() != root.child(4).key());
  CHECK(root.child(1).child(2).key() != root.child(2).child(1).key());
}

TEST_CASE("normal moments") {
  RngStream rng(Seeder(7).child(1));
  MomentAccumulator acc;
  for (int i = 0; i < 200000; ++i) acc.add(rng.normal());
  CHECK(std::abs(acc.mean()) < 4.0 * acc.stderr_mean());
  CHECK(acc.variance() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson sampler matches mean and variance across regimes") {
  for (double mean : {0.5, 7.0, 45.0, 800.0}) {
    RngStream rng(Seeder(11).child(static_cast<std::uint64_t>(mean * 10)));
    MomentAccumulator acc;
    const int n = 40000;
    for (int i = 0; i < n; ++i) acc.add(static_cast<double>(rng.poisson(mean)));
    CHECK(std::abs(acc.mean() - mean) < 4.0 * acc.stderr_mean());
    CHECK(std::abs(acc.variance() - mean) < 5.0 * acc.stderr_variance());
  }
}

TEST_CASE("chi squared tail against known values") {
  // 1 - F_k(x) reference points.
  CHECK(chi_squared_tail(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_squared_tail(18.307038053275146, 10.0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_squared_tail(2.0, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("skellam pmf sums to one and matches simulation") {
  const double mu = 0.32;
  const auto pmf = skellam_pmf(mu, 12);
  double total = 0.0;
  for (const auto& [k, p] : pmf) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  RngStream rng(Seeder(5).child(9));
  std::map<int, int> hist;
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const int d = static_cast<int>(rng.poisson(mu)) - static_cast<int>(rng.poisson(mu));
    hist[d]++;
  }
  std::vector<std::uint64_t> obs;
  std::vector<double> prob;
  for (const auto& [k, p] : pmf) {
    obs.push_back(static_cast<std::uint64_t>(hist.count(k) ? hist[k] : 0));
    prob.push_back(p);
  }
  const GofResult g = chi_squared_gof(obs, prob, n);
  CHECK(g.p_value > 0.001);
}

TEST_CASE("variance stderr uses the fourth moment") {
  RngStream rng(Seeder(3).child(3));
  MomentAccumulator acc;
  for (int i = 0; i < 50000; ++i) acc.add(rng.normal() * 2.0);
  // Var = 4, stderr ~ sqrt((mu4 - sigma^4)/n) = sigma^2 sqrt(2/n) ~ 0.0253.
  CHECK(acc.variance() == doctest::Approx(4.0).epsilon(0.05));
  CHECK(acc.stderr_variance() == doctest::Approx(4.0 * std::sqrt(2.0 / 50000.0)).epsilon(0.15));
}
