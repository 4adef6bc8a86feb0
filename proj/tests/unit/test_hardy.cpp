#include <doctest.h>

#include <cmath>

#include "vlab/errors.hpp"
#include "vlab/hardy.hpp"

using namespace vlab;
using namespace vlab::hardy;

TEST_CASE("Hardy constants") {
  CHECK(hardy_constant(3) == 0.25);
  CHECK(hardy_constant(6) == 4.0);
  CHECK(hardy_constant(12) == 25.0);
  CHECK_THROWS_AS(hardy_constant(2), DomainError);
  CHECK(angular_hardy(1, 4) == doctest::Approx(15.0 / 4.0));
  CHECK(angular_hardy(1, 3) == doctest::Approx(2.0));
}

TEST_CASE("decay bounds") {
  DecayQuery q;
  q.mode = DecayMode::one_body_short_range;
  q.d = 3;
  CHECK(*decay_bound(q).alpha_sup == doctest::Approx(0.5));

  q.mode = DecayMode::one_body_long_range_critical;
  q.beta1 = 0.75;
  CHECK(*decay_bound(q).alpha_sup == doctest::Approx(1.0));
  q.beta1 = 2.0;
  CHECK(*decay_bound(q).alpha_sup == doctest::Approx(1.5));

  q.mode = DecayMode::one_body_long_range_subcritical;
  q.beta2 = 1.0;
  CHECK(*decay_bound(q).kappa == doctest::Approx(0.5));

  q = DecayQuery{};
  q.mode = DecayMode::n_body;
  q.n = 3;
  q.particles = 3;
  CHECK(*decay_bound(q).alpha_sup == doctest::Approx(2.0));
  for (int n : {3, 4}) {
    for (int big_n : {3, 4, 5}) {
      q.n = n;
      q.particles = big_n;
      const double a = *decay_bound(q).alpha_sup;
      CHECK(a * a == doctest::Approx(hardy_constant(n * (big_n - 1))).epsilon(1e-15));
    }
  }
  q.particles = 2;
  CHECK_THROWS_AS(decay_bound(q), ArgumentError);
}

TEST_CASE("L2 classification") {
  CHECK(eigenvalue_or_resonance(3, 1.0) == Classification::resonance);
  CHECK(eigenvalue_or_resonance(5, 3.0) == Classification::eigenvalue);
  CHECK(eigenvalue_or_resonance(4, 2.0) == Classification::marginal);
  CHECK(eigenvalue_or_resonance(3, 1.52, 0.05) == Classification::marginal);
  // Monotone in s.
  Classification prev = Classification::resonance;
  for (double s = 0.0; s < 4.0; s += 0.01) {
    const auto c = eigenvalue_or_resonance(5, s, 0.0);
    if (prev == Classification::eigenvalue) CHECK(c == Classification::eigenvalue);
    prev = c;
  }
  CHECK(weighted_l2_threshold(3, 1.0) == doctest::Approx(0.5));
  CHECK(parse_decay_mode(to_string(DecayMode::n_body)) == DecayMode::n_body);
  CHECK_THROWS_AS(parse_decay_mode("nonsense"), ArgumentError);
}

TEST_CASE("three fermions on a line: constant 9") {
  RadialGrid grid;
  grid.rho0 = 1.0;
  grid.rho1 = 1e4;
  grid.points = 2000;
  const auto res = fermion1d_constant_check(grid, 10);
  CHECK(res.min_rayleigh >= 9.0 * 0.99);
  CHECK(res.min_rayleigh <= 9.0 * 1.01);
  CHECK(res.minimizing_mode == 1);
  REQUIRE(res.mode_minimum.size() == 10);
  CHECK(res.mode_minimum[1] >= 36.0 * (1 - 1e-12));
  for (std::size_t n = 1; n < res.mode_minimum.size(); ++n) CHECK(res.mode_minimum[n] > res.mode_minimum[n - 1]);
  CHECK(res.joint_minimum == doctest::Approx(res.min_rayleigh).epsilon(1e-9));
}

TEST_CASE("three fermions: wider annuli approach 9 from above") {
  double prev = 1e300;
  for (double ratio : {1e2, 1e3, 1e4, 1e5}) {
    RadialGrid grid;
    grid.rho1 = ratio;
    grid.points = 2000;
    grid.boundary = RadialBoundary::dirichlet;
    const double m = fermion1d_constant_check(grid, 1).min_rayleigh;
    CHECK(m >= 9.0);
    CHECK(m <= prev + 1e-3);
    prev = m;
  }
}

TEST_CASE("three fermions: degenerate grids are rejected") {
  RadialGrid grid;
  grid.rho1 = 0.5;
  CHECK_THROWS_AS(fermion1d_constant_check(grid, 1), ArgumentError);
  grid.rho1 = 10.0;
  grid.points = 2;
  CHECK_THROWS_AS(fermion1d_constant_check(grid, 1), ArgumentError);
  grid.points = 100;
  CHECK_THROWS_AS(fermion1d_constant_check(grid, 0), ArgumentError);
}
