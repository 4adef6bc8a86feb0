#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vlab/cutoffs.hpp"
#include "vlab/geometry.hpp"
#include "vlab/hardy.hpp"

using namespace vlab;
using namespace vlab::cutoffs;

TEST_CASE("smoothstep") {
  CHECK(smoothstep(0.0) == 0.0);
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(0.5) == doctest::Approx(0.5));
  CHECK(smoothstep_slope(0.0) == 0.0);
  CHECK(smoothstep_slope(1.0) == 0.0);
  CHECK(smoothstep_slope(0.5) == doctest::Approx(1.5));
}

TEST_CASE("radial pair: shape, unity and certified bound") {
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    CAPTURE(eps);
    const auto pair = build_radial_cutoff(eps, 1.0, 3);
    CHECK(pair.b() < pair.b_prime());
    CHECK(std::log(pair.b_prime()) < pair.log_b_tilde());
    CHECK(pair.outer_condition() <= eps * (1 + 1e-12));

    CHECK(pair.evaluate(0.5).chi1 == 1.0);
    CHECK(pair.evaluate(0.5).dchi1 == 0.0);
    if (std::isfinite(pair.b_tilde())) {
      CHECK(pair.evaluate(2.0 * pair.b_tilde()).chi1 == 0.0);
      CHECK(pair.evaluate(2.0 * pair.b_tilde()).chi2 == 1.0);
    }

    // 1000 radii, log-spaced up to b~ (capped where exp overflows).
    const double log_hi = std::min(pair.log_b_tilde(), 700.0);
    double prev = 1.0, worst_unity = 0.0, worst_ratio = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double lr = log_hi * k / 1000.0;
      const auto v = pair.evaluate(std::exp(lr));
      worst_unity = std::max(worst_unity, std::abs(v.chi1 * v.chi1 + v.chi2 * v.chi2 - 1.0));
      CHECK(v.chi1 <= prev);
      prev = v.chi1;
      worst_ratio = std::max(worst_ratio, pair.bound_ratio(lr));
    }
    CHECK(worst_unity <= 1e-14);
    CHECK(worst_ratio <= 1.0 + 1e-9);
    CHECK(verify_radial_bound(pair, 10000).max_ratio <= 1.0 + 1e-9);
  }
}

TEST_CASE("radial pair: b~ grows as epsilon shrinks") {
  double prev = -1.0;
  for (double eps : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
    const double lbt = build_radial_cutoff(eps, 1.0, 3).log_b_tilde();
    CHECK(lbt > prev);
    prev = lbt;
  }
}

TEST_CASE("radial pair: negative control and the flat region") {
  const auto pair = build_radial_cutoff(0.1, 1.0, 3);
  const auto shrunk = pair.with_log_b_tilde(pair.log_b_tilde() - std::numbers::ln2);
  CHECK(verify_radial_bound(shrunk, 10000).max_ratio > 1.0);
  CHECK(verify_radial_bound(pair, 1000, std::log(1e-3), std::log(0.999)).max_ratio == 0.0);
}

TEST_CASE("radial pair: analytic derivative against centred differences") {
  const auto pair = build_radial_cutoff(0.05, 2.0, 3);
  for (double r : {2.05, 2.2, pair.b_prime() * 1.5, pair.b_prime() * 40.0}) {
    if (!(std::log(r) < pair.log_b_tilde() - 1e-3) || !(r > pair.b())) continue;
    const double h = 1e-6 * r;
    const auto v = pair.evaluate(r);
    const auto lo = pair.evaluate(r - h), hi = pair.evaluate(r + h);
    const double fd1 = (hi.chi1 - lo.chi1) / (2 * h);
    const double fd2 = (hi.chi2 - lo.chi2) / (2 * h);
    const double scale = std::hypot(v.dchi1, v.dchi2);
    CHECK(std::abs(fd1 - v.dchi1) <= 1e-5 * scale);
    CHECK(std::abs(fd2 - v.dchi2) <= 1e-5 * scale);
  }
  const auto rep = check_radial_consistency(pair, 20000);
  CHECK(rep.max_unity_error <= 1e-14);
  CHECK(rep.max_derivative_error <= 1e-5);
}

TEST_CASE("radial pair: gaussian localisation in d = 3") {
  const auto pair = build_radial_cutoff(0.01, 1.0, 3);
  CHECK(1.0 / hardy::hardy_constant(3) == 4.0);
  for (double w : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const auto li = gaussian_localization_error(pair, w);
    CHECK(li.lhs >= 0.0);
    CHECK(li.lhs <= li.rhs);
  }
}

TEST_CASE("cone pair: apertures, plateau and unity") {
  const geometry::MassSystem sys(3, {1.0, 1.0, 1.0});
  const auto z = geometry::parse_partition("({1,2},{3})", 3);
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    CAPTURE(eps);
    const auto pair = build_cone_cutoff(sys, z, eps, 0.5);
    CHECK(pair.kappa_prime() < pair.kappa_second());
    CHECK(pair.kappa_second() < pair.kappa());
    CHECK(pair.log_part_condition() <= eps * (1 + 1e-12));

    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double lt = std::log(pair.kappa()) + 0.002 * k - 1.5;
      const auto p = pair.profile(lt);
      const double u = std::cos(p.psi), v = std::sin(p.psi);
      worst = std::max(worst, std::abs(u * u + v * v - 1.0));
    }
    CHECK(worst <= 1e-14);
  }

  const auto pair = build_cone_cutoff(sys, z, 0.1, 0.5);
  std::mt19937_64 rng(9);
  const auto inside = geometry::ratio_point(sys, z, 0.5 * pair.kappa_prime(), rng);
  const auto v = pair.evaluate(inside);
  CHECK(v.u == 1.0);
  CHECK(v.v == 0.0);
  CHECK(geometry::mass_norm(sys, v.grad_u) == 0.0);
  const auto outside = geometry::ratio_point(sys, z, 2.0 * pair.kappa(), rng);
  CHECK(pair.evaluate(outside).u == 0.0);

  // Breakpoints give finite values.
  for (double t : {pair.kappa_prime(), pair.kappa_second(), pair.kappa()}) {
    const auto b = pair.evaluate(geometry::ratio_point(sys, z, t, rng));
    CHECK(std::isfinite(geometry::mass_norm(sys, b.grad_u)));
    CHECK(std::isfinite(geometry::mass_norm(sys, b.grad_v)));
  }
}

TEST_CASE("cone pair: certified bound and negative control") {
  const geometry::MassSystem sys(3, {1.0, 1.0, 1.0});
  const auto z = geometry::parse_partition("({1,2},{3})", 3);
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto pair = build_cone_cutoff(sys, z, eps, 0.5);
    const auto rep = verify_cone_bound(pair, 10000, 77);
    CHECK(rep.max_defect <= 1.0 + 1e-9);
    CHECK(rep.configurations > 0);
    const auto cc = check_cone_consistency(pair, 3000, 78);
    CHECK(cc.max_unity_error <= 1e-14);
    CHECK(cc.max_derivative_error <= 1e-5);
  }
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto pair = build_cone_cutoff(sys, z, eps, 0.5);
    const double log_second = std::log(pair.kappa_second());
    const auto narrow = pair.with_log_kappa_prime(log_second - 0.01 * (log_second - pair.log_kappa_prime()));
    CHECK(verify_cone_bound(narrow, 10000, 77).max_defect > 1.0);
  }
}

TEST_CASE("cone pair: the chain rule gradient matches a hand formula") {
  // For v = f(t), |grad v|_m^2 = f'(t)^2 (1 + t^2) / |xi|_m^2 on a configuration
  // with |xi|_m = 1.
  const geometry::MassSystem sys(1, {1.0, 2.0, 3.0});
  const auto z = geometry::parse_partition("({1},{2,3})", 3);
  const auto pair = build_cone_cutoff(sys, z, 0.05, 0.5);
  std::mt19937_64 rng(4);
  for (double t : {0.5 * (pair.kappa_prime() + pair.kappa_second()), 0.5 * (pair.kappa_second() + pair.kappa())}) {
    auto x = geometry::ratio_point(sys, z, t, rng);
    const auto s = geometry::split_norms(sys, z, x);
    x *= 1.0 / std::sqrt(s.xi_sq);
    const auto val = pair.evaluate(x);
    const auto prof = pair.profile(std::log(t));
    const double grad_sq = std::pow(geometry::mass_norm(sys, val.grad_u), 2) + std::pow(geometry::mass_norm(sys, val.grad_v), 2);
    const double dpsi_dt = prof.dpsi_ds / t;
    CHECK(grad_sq == doctest::Approx(dpsi_dt * dpsi_dt * (1 + t * t)).epsilon(1e-10));
  }
}
