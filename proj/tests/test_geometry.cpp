#include <doctest.h>

#include <cmath>

#include "loopsoup/geometry.hpp"
#include "loopsoup/rng.hpp"

using namespace loopsoup;

TEST_CASE("boundary distances are exact for the catalog") {
  const Domain disk = Domain::unit_disk();
  CHECK(disk.boundary_distance({0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(disk.boundary_distance({0.6, 0.0}) == doctest::Approx(0.4));
  CHECK_THROWS_AS(disk.boundary_distance({1.5, 0.0}), DomainError);

  const Domain sq = Domain::square({0.0, 0.0}, 2.0);
  CHECK(sq.boundary_distance({0.3, 0.1}) == doctest::Approx(0.7));
  CHECK(sq.diameter() == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("mobius derivative modulus") {
  CHECK(mobius_derivative_modulus({0.0, 0.0}, {0.3, 0.2}) == doctest::Approx(1.0));
  CHECK(mobius_derivative_modulus({0.5, 0.0}, {0.0, 0.0}) == doctest::Approx(0.75));
  CHECK(mobius_derivative_modulus({0.5, 0.0}, {0.5, 0.0}) == doctest::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(mobius_derivative_modulus({1.0, 0.0}, {0.0, 0.0}), ConfigError);
}

TEST_CASE("mobius maps preserve the unit disk") {
  RngStream rng(Seeder(17).child(0));
  for (int i = 0; i < 200; ++i) {
    const double ra = 0.95 * std::sqrt(rng.uniform());
    const double ta = 2.0 * M_PI * rng.uniform();
    const Point a = std::polar(ra, ta);
    const ConformalMap f = ConformalMap::mobius(a);
    const Point z = std::polar(0.999 * std::sqrt(rng.uniform()), 2.0 * M_PI * rng.uniform());
    CHECK(std::abs(f(z)) < 1.0);
    CHECK(f.derivative_modulus(z) > 0.0);
  }
}

TEST_CASE("composition obeys the chain rule against the closed form") {
  // f_a o f_b = rotation * f_c with c = (a+b)/(1 + a conj(b)), so the
  // composite modulus has an independent closed form.
  RngStream rng(Seeder(23).child(0));
  for (int i = 0; i < 200; ++i) {
    const Point a = std::polar(0.8 * rng.uniform(), 2.0 * M_PI * rng.uniform());
    const Point b = std::polar(0.8 * rng.uniform(), 2.0 * M_PI * rng.uniform());
    const Point z = std::polar(0.9 * rng.uniform(), 2.0 * M_PI * rng.uniform());
    const ConformalMap comp =
        ConformalMap::compose(ConformalMap::mobius(a), ConformalMap::mobius(b));
    const Point c = (a + b) / (1.0 + a * std::conj(b));
    const double expected = (1.0 - std::norm(c)) / std::norm(1.0 - std::conj(c) * z);
    CHECK(comp.derivative_modulus(z) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("cayley map sends the disk to the upper half plane") {
  const ConformalMap k = ConformalMap::cayley();
  CHECK(k(Point{0.0, 0.0}) == Point{0.0, 1.0});
  RngStream rng(Seeder(29).child(0));
  for (int i = 0; i < 100; ++i) {
    const Point z = std::polar(0.99 * std::sqrt(rng.uniform()), 2.0 * M_PI * rng.uniform());
    CHECK(k(z).imag() > 0.0);
  }
  CHECK(k.derivative_modulus({0.0, 0.0}) == doctest::Approx(2.0));
}

TEST_CASE("point pair distances") {
  const Domain disk = Domain::unit_disk();
  const PointPair pp(disk, {-0.3, 0.0}, {0.3, 0.0});
  CHECK(pp.d_zw == doctest::Approx(0.6));
  CHECK(pp.d_wz == doctest::Approx(0.6));
  const PointPair pq(disk, {0.9, 0.0}, {0.0, 0.0});
  CHECK(pq.d_zw == doctest::Approx(0.1));  // boundary wins
  CHECK(pq.d_wz == doctest::Approx(0.9));
}
