#include <doctest.h>

#include <cmath>
#include <vector>

#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/sampler.hpp"
#include "loopsoup/stats.hpp"

using namespace loopsoup;

TEST_CASE("truncation bias ledger stays below eps_mass") {
  SamplerOptions opt;
  opt.delta0 = 0.05;
  const LoopSampler s(Domain::unit_disk(), opt);
  CHECK(s.bias().total() <= opt.eps_mass);
  CHECK(s.candidate_mass() > 0.0);
  CHECK(s.t_min() < 1e-3);
  CHECK(s.t_max() == doctest::Approx(4.0));
}

TEST_CASE("exact annulus law at the origin") {
  // alpha_{delta,R}(0) = (1/5) log(R/delta) for B(0,R) inside the disk.
  SamplerOptions opt;
  opt.delta0 = 0.1;
  const LoopSampler s(Domain::unit_disk(), opt);
  QuerySet q;
  q.points = {{0.0, 0.0}};
  q.diam_thresholds = {0.1, 0.5};
  const double lambda = 6.0;
  const int reps = 250;
  MomentAccumulator acc;
  Seeder seed(2026);
  for (int r = 0; r < reps; ++r) {
    double count = 0.0;
    s.run(lambda, seed.child(static_cast<std::uint64_t>(r)), q, [&](const LoopReport& rep) {
      if ((rep.coverage & 1) && rep.diam_index == 1) count += 1.0;
    });
    acc.add(count / lambda);
  }
  const double target = alpha_exact_annulus(0.1, 0.5);
  const double se = std::max(acc.stderr_mean(), std::sqrt(acc.mean() / (lambda * reps)));
  INFO("estimate ", acc.mean(), " target ", target, " stderr ", se);
  CHECK(std::abs(acc.mean() - target) < 3.5 * se);
  CHECK(se < 0.02);
}

TEST_CASE("counting mode and keep-path mode agree loop by loop") {
  SamplerOptions opt;
  opt.delta0 = 0.15;
  const LoopSampler s(Domain::unit_disk(), opt);
  QuerySet fast, full;
  fast.points = full.points = {{0.0, 0.0}, {0.4, 0.3}};
  fast.diam_thresholds = full.diam_thresholds = {0.15, 0.4};
  full.keep_paths = true;
  const Seeder seed = Seeder(99).child(1);
  struct Row {
    int sign;
    std::uint32_t di;
    std::uint64_t cov;
  };
  std::vector<Row> a, b;
  s.run(2.0, seed, fast, [&](const LoopReport& r) { a.push_back({r.sign, r.diam_index, r.coverage}); });
  s.run(2.0, seed, full, [&](const LoopReport& r) {
    b.push_back({r.sign, r.diam_index, r.coverage});
    CHECK(r.loop != nullptr);
    CHECK(r.diameter_exact);
    CHECK(r.loop->path.front() == r.loop->path.back());
  });
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].sign == b[i].sign);
    CHECK(a[i].cov == b[i].cov);
    CHECK(a[i].di == b[i].di);
  }
}

TEST_CASE("runs are deterministic given the seed") {
  SamplerOptions opt;
  opt.delta0 = 0.2;
  const LoopSampler s(Domain::unit_disk(), opt);
  QuerySet q;
  q.points = {{0.1, -0.2}};
  q.diam_thresholds = {0.2};
  auto run_once = [&] {
    std::vector<std::pair<int, std::uint64_t>> rows;
    s.run(3.0, Seeder(4242).child(7), q,
          [&](const LoopReport& r) { rows.emplace_back(r.sign, r.coverage); });
    return rows;
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("cover counts are Poisson across replicas") {
  SamplerOptions opt;
  opt.delta0 = 0.2;
  const LoopSampler s(Domain::unit_disk(), opt);
  QuerySet q;
  q.points = {{0.0, 0.0}};
  q.diam_thresholds = {0.2};
  const double lambda = 3.0;
  MomentAccumulator acc;
  Seeder seed(31337);
  for (int r = 0; r < 400; ++r) {
    double count = 0.0;
    s.run(lambda, seed.child(static_cast<std::uint64_t>(r)), q,
          [&](const LoopReport& rep) { count += (rep.coverage & 1) ? 1.0 : 0.0; });
    acc.add(count);
  }
  // Poisson: variance equals the mean.
  CHECK(std::abs(acc.variance() - acc.mean()) <
        3.0 * std::hypot(acc.stderr_variance(), acc.stderr_mean()));
}

TEST_CASE("ball classes match loop geometry") {
  SamplerOptions opt;
  opt.delta0 = 0.2;
  const LoopSampler s(Domain::unit_disk(), opt);
  QuerySet q;
  q.points = {{0.0, 0.0}};
  q.diam_thresholds = {0.2};
  q.ball_thresholds = {0.2, 0.4};
  q.keep_paths = true;
  s.run(4.0, Seeder(17).child(17), q, [&](const LoopReport& r) {
    if (!(r.coverage & 1)) return;
    double maxd = 0.0;
    for (const Point& p : r.loop->path) maxd = std::max(maxd, std::abs(p));
    const int expect = (maxd >= 0.4) ? 2 : (maxd >= 0.2 ? 1 : 0);
    CHECK(static_cast<int>(r.ball_class[0]) == expect);
  });
}
