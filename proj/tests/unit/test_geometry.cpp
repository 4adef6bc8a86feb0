#include <doctest.h>

#include <cmath>
#include <random>

#include "vlab/errors.hpp"
#include "vlab/geometry.hpp"

using namespace vlab;
using namespace vlab::geometry;

namespace {

Configuration random_relative(const MassSystem& sys, std::mt19937_64& rng) { return gaussian_relative(sys, rng); }

// Plain loops, independent of the library's projections.
double plain_inner(const std::vector<double>& m, int n, const Configuration& x, const Configuration& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (int a = 0; a < n; ++a) s += m[i] * x[i * n + a] * y[i * n + a];
  return s;
}

double max_abs_diff(const Configuration& a, const Configuration& b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}

}  // namespace

TEST_CASE("mass inner product is symmetric, positive and obeys Cauchy-Schwarz") {
  const MassSystem sys(3, {0.4, 2.0, 7.5, 1.1});
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const auto x = random_relative(sys, rng);
    const auto y = random_relative(sys, rng);
    const double xy = mass_inner(sys, x, y);
    CHECK(xy == doctest::Approx(mass_inner(sys, y, x)).epsilon(1e-14));
    CHECK(xy == doctest::Approx(plain_inner(sys.masses(), 3, x, y)).epsilon(1e-12));
    CHECK(mass_inner(sys, x, x) > 0.0);
    CHECK(std::abs(xy) <= mass_norm(sys, x) * mass_norm(sys, y) * (1 + 1e-14));
  }
}

TEST_CASE("partition projections are complementary orthogonal idempotents on X0") {
  const MassSystem sys(2, {1.0, 3.0, 0.5, 2.0, 4.0});
  const auto z = parse_partition("({1,3},{2,5},{4})", 5);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto x = random_relative(sys, rng);
    const auto y = random_relative(sys, rng);
    const auto px = project_partition(sys, z, x);
    const auto py = project_partition(sys, z, y);
    const double scale = mass_norm(sys, x);
    CHECK(max_abs_diff(px.q + px.xi, x) <= 1e-12 * scale);
    CHECK(std::abs(mass_inner(sys, px.q, px.xi)) <= 1e-12 * scale * scale);
    // Idempotence of both parts.
    const auto pq = project_partition(sys, z, px.q);
    CHECK(max_abs_diff(pq.q, px.q) <= 1e-12 * scale);
    CHECK(mass_norm(sys, pq.xi) <= 1e-12 * scale);
    // Self-adjointness.
    CHECK(mass_inner(sys, px.q, y) == doctest::Approx(mass_inner(sys, x, py.q)).epsilon(1e-11));
    // Direct norms agree with the projections.
    const auto s = split_norms(sys, z, x);
    CHECK(s.q_sq == doctest::Approx(mass_inner(sys, px.q, px.q)).epsilon(1e-12));
    CHECK(s.xi_sq == doctest::Approx(mass_inner(sys, px.xi, px.xi)).epsilon(1e-12));
  }
}

TEST_CASE("cluster projections: centre of mass by hand") {
  const MassSystem sys(1, {1.0, 3.0, 2.0});
  const Configuration x(std::vector<double>{0.0, 4.0, -6.0});
  const Cluster c({0, 1});
  const auto cm = cluster_cm(sys, c, x);
  REQUIRE(cm.size() == 1);
  CHECK(cm[0] == doctest::Approx(3.0));
  const auto p0 = project_internal(sys, c, x);
  CHECK(p0[0] == doctest::Approx(-3.0));
  CHECK(p0[1] == doctest::Approx(1.0));
  CHECK(p0[2] == 0.0);
  const auto pc = project_cluster_cm(sys, c, x);
  CHECK(pc[0] == doctest::Approx(3.0));
  CHECK(pc[2] == 0.0);
}

TEST_CASE("partitions: Bell numbers, labels and parsing") {
  CHECK(all_partitions(3).size() == 5);
  CHECK(all_partitions(4).size() == 15);
  CHECK(all_partitions(5).size() == 52);
  CHECK(partitions_of_order(4, 2).size() == 7);
  CHECK(partitions_of_order(5, 3).size() == 25);

  const auto z = parse_partition("({3},{1,2})", 3);
  CHECK(z.label() == "({1,2},{3})");
  CHECK(parse_partition(z.label(), 3) == z);
  CHECK_THROWS_AS(parse_partition("({1,2})", 3), ArgumentError);
  CHECK_THROWS_AS(parse_partition("({1,2},{2,3})", 3), ArgumentError);
  CHECK_THROWS_AS(parse_partition("({1,4},{2,3})", 3), ArgumentError);

  const auto a = parse_partition("({1,2},{3},{4})", 4);
  const auto b = parse_partition("({1},{2,3},{4})", 4);
  CHECK(join(a, b).label() == "({1,2,3},{4})");
  CHECK(refines(a, join(a, b)));
  CHECK_FALSE(refines(join(a, b), a));
}

TEST_CASE("pair-sum identities hold to 1e-12 on random draws") {
  for (int n_particles : {2, 4, 6}) {
    for (int dim : {1, 3}) {
      const auto rep = identity_suite(n_particles, dim, 300, 0.1, 10.0, 42u + static_cast<unsigned>(n_particles));
      CHECK(rep.internal <= 1e-12);
      CHECK(rep.centre_of_mass <= 1e-12);
      CHECK(rep.merge <= 1e-12);
    }
  }
}

TEST_CASE("internal pair-sum identity against a hand computation") {
  // Two particles, masses 1 and 3, n = 1: sum_{i<j} m_i m_j (x_i - x_j)(y_i - y_j) / M[C]
  // equals <P0[C]x, P0[C]y>_m.
  const MassSystem sys(1, {1.0, 3.0});
  const Configuration x(std::vector<double>{3.0, -1.0});
  const Configuration y(std::vector<double>{-1.5, 0.5});
  const auto id = gram_identity_internal(sys, Cluster({0, 1}), x, y);
  const double expected = 1.0 * 3.0 * (4.0) * (-2.0) / 4.0;
  CHECK(id.lhs == doctest::Approx(expected));
  CHECK(id.rhs == doctest::Approx(expected));
}

TEST_CASE("AZS ladder: N=3 equal masses") {
  const MassSystem sys(1, {1.0, 1.0, 1.0});
  const auto ladder = azs_ladder(sys, 2, 1.0, 0.5);
  // d^2(2) = (m^3 / 2M^3) k'(1)^2 / (1 + k'(1)^2) = (1/54)(0.25/1.25).
  CHECK(ladder.d(2) * ladder.d(2) == doctest::Approx(1.0 / 270.0).epsilon(1e-14));
  CHECK(ladder_d_sq(sys, 0.5) == doctest::Approx(1.0 / 270.0).epsilon(1e-14));

  // Substitute kappa(2) back into both inequalities, written out here.
  const double k = ladder.kappa(2), kp = 0.5, a = 1.0 / 27.0, d2 = 1.0 / 270.0;
  const double left = a * (kp * kp - k * k) / (1.0 + kp * kp) - k * k;
  const double right = k * k * (1.0 + k * k);
  CHECK(left > d2);
  CHECK(d2 > right);
  CHECK(ladder.kappa_prime(2) == doctest::Approx(k / 2));
  CHECK(rung_inequality(sys, ladder, 2).holds());
  CHECK(rung_inequality(sys, ladder, 2).d_sq == doctest::Approx(d2).epsilon(1e-14));
  CHECK_FALSE(ladder.rung(1).d.has_value());
}

TEST_CASE("AZS ladder invariants for N = 3..6 and unequal masses") {
  for (const auto& masses : std::vector<std::vector<double>>{
           {1, 1, 1}, {0.5, 2, 7}, {1, 1, 1, 1}, {0.3, 1, 2.5, 8}, {1, 1, 1, 1, 1}, {0.2, 0.7, 1.5, 4, 9},
           {0.1, 1, 2, 3, 5, 10}}) {
    const MassSystem sys(1, masses);
    const int l_max = sys.particles() - 1;
    const auto ladder = azs_ladder(sys, l_max, 1.0, 0.5);
    for (int l = 2; l <= l_max; ++l) {
      CAPTURE(l);
      CHECK(rung_inequality(sys, ladder, l).holds());
      CHECK(ladder.kappa_prime(l) < ladder.kappa(l));
      CHECK(ladder.kappa(l) > 0.0);
      CHECK(ladder.d(l) * ladder.d(l) == doctest::Approx(ladder_d_sq(sys, ladder.kappa_prime(l - 1))).epsilon(1e-15));
    }
    const auto broken = ladder.with_kappa_scaled(2, 100.0);
    CHECK_FALSE(rung_inequality(sys, broken, 2).holds());
  }
}

TEST_CASE("cone membership conventions") {
  const MassSystem sys(1, {1.0, 1.0, 1.0});
  const Configuration x(std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(in_cone(sys, Partition::singletons(3), 1e-9, x));
  CHECK(in_cone(sys, Partition::single_cluster(3), 2.0, x));
  CHECK_FALSE(in_cone(sys, Partition::single_cluster(3), 1.0, x));
  // ({1,3},{2}): q = (-1, 0, 1), xi = 0, so the point is outside every such cone.
  CHECK_FALSE(in_cone(sys, parse_partition("({1,3},{2})", 3), 100.0, x));
}

TEST_CASE("cone sampler stays on the unit sphere of X0 inside the cone") {
  const MassSystem sys(2, {0.5, 1.0, 2.0, 4.0});
  const auto z = parse_partition("({1,2},{3},{4})", 4);
  const ConeSampler sampler(sys, z, 0.3);
  std::mt19937_64 rng(3);
  double max_ratio = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const auto x = sampler.draw(rng);
    CHECK(mass_norm(sys, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(is_relative(sys, x));
    const auto s = split_norms(sys, z, x);
    max_ratio = std::max(max_ratio, std::sqrt(s.q_sq / s.xi_sq));
  }
  CHECK(max_ratio <= 0.3 * (1 + 1e-12));
  // The cone is filled up to its edge.
  CHECK(max_ratio > 0.28);
}

TEST_CASE("cone separation: N=3, n=1, equal masses") {
  const MassSystem sys(1, {1.0, 1.0, 1.0});
  const auto ladder = azs_ladder(sys, 2, 1.0, 0.5);
  const auto hat = parse_partition("({1,2},{3})", 3);
  const auto tilde = parse_partition("({1,3},{2})", 3);
  const auto rep = check_cone_separation(sys, hat, tilde, ladder, 10000, 17);
  CHECK(rep.samples == 10000);
  CHECK(rep.violations == 0);
  CHECK(rep.intersection_violations == 0);
  CHECK(rep.worst_margin > 0.0);
  CHECK_THROWS_AS(check_cone_separation(sys, hat, hat, ladder, 100, 1), ArgumentError);

  const auto broken = ladder.with_kappa_scaled(2, 100.0);
  const auto bad = check_cone_separation(sys, hat, tilde, broken, 10000, 17);
  CHECK(bad.violations + bad.intersection_violations > 0);
}

TEST_CASE("internal lower bound") {
  SUBCASE("N=3, n=3, equal masses, |Z| = 2") {
    const MassSystem sys(3, {1.0, 1.0, 1.0});
    const auto ladder = azs_ladder(sys, 2, 1.0, 0.5);
    const auto z = parse_partition("({1,2},{3})", 3);
    const auto rep = check_internal_lower_bound(sys, z, Cluster({0, 2}), ladder, 10000, 23);
    CHECK(rep.samples == 10000);
    CHECK(rep.violations == 0);
    CHECK(rep.worst_ratio >= 1.0);
    CHECK_THROWS_AS(check_internal_lower_bound(sys, z, Cluster({0, 1}), ladder, 100, 1), ArgumentError);
  }
  SUBCASE("inflated kappa is caught") {
    const MassSystem sys(1, {1.0, 1.0, 1.0});
    const auto ladder = azs_ladder(sys, 2, 1.0, 0.5).with_kappa_scaled(2, 100.0);
    const auto z = parse_partition("({1,2},{3})", 3);
    const auto rep = check_internal_lower_bound(sys, z, Cluster({0, 2}), ladder, 10000, 23);
    CHECK(rep.violations > 0);
  }
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(MassSystem(1, {1.0}), ArgumentError);
  CHECK_THROWS_AS(MassSystem(0, {1.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(MassSystem(1, {1.0, -1.0}), ArgumentError);
  const MassSystem sys(1, {1.0, 1.0, 1.0});
  CHECK_THROWS_AS(ConeSampler(sys, Partition::singletons(3), 0.1), ArgumentError);
  CHECK_THROWS_AS(azs_ladder(sys, 2, 1.0, 2.0), ArgumentError);
}
