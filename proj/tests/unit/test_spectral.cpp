#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vlab/errors.hpp"
#include "vlab/spectral.hpp"

using namespace vlab;
using namespace vlab::spectral;

namespace {

constexpr double kPi = std::numbers::pi;

RadialProblem free_box(int d, int points, double r_max = kPi) {
  RadialProblem p;
  p.d = d;
  p.potential = PotentialSpec::square_well(1.0, 1.0).with_coupling(0.0);
  p.grid = {r_max, points};
  return p;
}

}  // namespace

TEST_CASE("tridiagonal eigenvalues") {
  linalg::SymTridiagonal t{{1.0, 3.0}, {0.0}};
  const auto ev = lowest_eigenvalues(t, 2);
  CHECK(ev[0] == doctest::Approx(1.0));
  CHECK(ev[1] == doctest::Approx(3.0));
  CHECK_THROWS_AS(lowest_eigenvalues(t, 3), ArgumentError);

  // Second difference matrix: eigenvalues 2 - 2 cos(k pi / (n + 1)).
  const int n = 50;
  linalg::SymTridiagonal lap{std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0)};
  const auto low = lowest_eigenvalues(lap, 5);
  for (int k = 1; k <= 5; ++k) CHECK(low[k - 1] == doctest::Approx(2 - 2 * std::cos(k * kPi / (n + 1))).epsilon(1e-13));
  CHECK(linalg::sturm_count(lap, 2.0) == 25);
}

TEST_CASE("free box follows the n^2 law at second order") {
  const auto ev = lowest_eigenvalues(discretize(free_box(3, 400)), 4);
  for (int k = 1; k <= 4; ++k) CHECK(ev[k - 1] == doctest::Approx(k * k).epsilon(1e-3));

  // Richardson slope over three refinements.
  double err[3];
  for (int i = 0; i < 3; ++i) err[i] = std::abs(lowest_eigenvalues(discretize(free_box(3, 100 << i)), 1)[0] - 1.0);
  for (int i = 0; i < 2; ++i) {
    const double slope = std::log2(err[i] / err[i + 1]);
    CHECK(slope >= 1.8);
    CHECK(slope <= 2.2);
  }
}

TEST_CASE("discretisation: kinetic scaling and centrifugal term") {
  auto p = free_box(3, 300);
  const auto e0 = lowest_eigenvalues(discretize(p), 3);
  p.epsilon = 0.5;
  const auto e1 = lowest_eigenvalues(discretize(p), 3);
  for (int k = 0; k < 3; ++k) CHECK(e1[k] == doctest::Approx(0.5 * e0[k]).epsilon(1e-12));

  const auto t3 = discretize(free_box(3, 300));
  const auto t5 = discretize(free_box(5, 300));
  const double h = kPi / 300;
  for (std::size_t i = 0; i < t3.size(); i += 37) {
    const double r = h * static_cast<double>(i + 1);
    CHECK(t5.diag[i] - t3.diag[i] == doctest::Approx(2.0 / (r * r)).epsilon(1e-10));
  }
}

TEST_CASE("discretisation: coarse grids are rejected") {
  RadialProblem p;
  p.potential = PotentialSpec::square_well(1.0, 1.0);
  p.grid = {200.0, 1000};
  CHECK_THROWS_AS(discretize(p), ResolutionError);
  p.grid = {200.0, 50};
  CHECK_THROWS(p.validate());
  p.grid = {200.0, 20000};
  p.epsilon = 1.0;
  CHECK_THROWS(p.validate());
}

TEST_CASE("cell averages are exact for the step and the tail") {
  const auto well = PotentialSpec::square_well(2.0, 1.0);
  CHECK(well.cell_average(0.5, 1.5) == doctest::Approx(-1.0));
  const auto tail = PotentialSpec::inverse_square_tail(3.0, 1.0);
  // (1/(b-a)) int_a^b 3 r^-2 dr = 3 / (a b).
  CHECK(tail.cell_average(2.0, 4.0) == doctest::Approx(3.0 / 8.0));
  CHECK(tail.cell_average(0.5, 1.5) == doctest::Approx((-0.5 + 3.0 * (1.0 - 1.0 / 1.5)) / 1.0));
}

TEST_CASE("Sturm count agrees with the reported negative eigenvalues") {
  RadialProblem p;
  p.potential = PotentialSpec::square_well(1.0, 1.0).with_coupling(60.0);
  p.grid = {50.0, 5000};
  const auto rep = analyze(p, 16);
  CHECK(rep.negative_count == linalg::sturm_count(discretize(p), 0.0));
  CHECK(static_cast<long>(rep.eigenvalues.size()) == rep.negative_count);
  CHECK(rep.negative_count == 2);  // sqrt(60) ~ 7.75 lies between 3 pi / 2 and 5 pi / 2
}

TEST_CASE("critical coupling of the d = 3 square well") {
  const Grid grid{200.0, 20000};
  const auto cc = critical_coupling(PotentialSpec::square_well(1.0, 1.0), 3, grid);
  const double oracle = kPi * kPi / 4.0;
  CHECK(std::abs(cc.lambda_star / oracle - 1.0) < 5e-3);
  CHECK(cc.ground_energy >= -1e-10);
  CHECK(cc.ground_energy <= 0.0);
  CHECK(cc.witness_energy < 0.0);

  // Just below criticality: nothing at eps = 0, a bound state once eps exceeds 1%.
  RadialProblem p;
  p.potential = PotentialSpec::square_well(1.0, 1.0);
  p.grid = grid;
  const double lambda = 0.99 * cc.lambda_star;
  auto below = p;
  below.potential = p.potential.with_coupling(lambda);
  CHECK(analyze(below).negative_count == 0);
  below.epsilon = 0.05;
  CHECK(analyze(below).ground_energy < 0.0);

  // Shooting refines to the continuum value.
  const auto sc = refine_critical_coupling(PotentialSpec::square_well(1.0, 1.0), 3, cc.lambda_star, 1e3);
  CHECK(sc.lambda_star == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("ground energy is monotone in the coupling and in epsilon") {
  RadialProblem p;
  p.grid = {60.0, 6000};
  double prev = 1e300;
  for (double lambda : {3.0, 4.0, 6.0, 10.0}) {
    p.potential = PotentialSpec::square_well(1.0, 1.0).with_coupling(lambda);
    const double e = analyze(p).ground_energy;
    CHECK(e <= prev);
    prev = e;
  }
  p.potential = PotentialSpec::square_well(1.0, 1.0).with_coupling(4.0);
  const auto sweep = epsilon_sweep(p, 4.0, {0.5, 0.25, 0.1, 0.0});
  // Descending eps restores kinetic energy, so the ground energy can only rise.
  for (std::size_t i = 1; i < sweep.size(); ++i) CHECK(sweep[i].ground_energy >= sweep[i - 1].ground_energy);
  CHECK_THROWS_AS(epsilon_sweep(p, 4.0, {0.1, 0.5}), ArgumentError);
}

TEST_CASE("epsilon sweep at criticality and at zero coupling") {
  RadialProblem p;
  p.potential = PotentialSpec::square_well(1.0, 1.0);
  p.grid = {200.0, 20000};
  const double lambda = critical_coupling(p.potential, 3, p.grid).lambda_star;
  std::vector<double> eps;
  for (int n = 2; n <= 16; ++n) eps.push_back(1.0 / n);
  const auto sweep = epsilon_sweep(p, lambda, eps);
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    CHECK(sweep[i].ground_energy < 0.0);
    if (i > 0) CHECK(sweep[i].ground_energy > sweep[i - 1].ground_energy);
  }
  for (const auto& r : epsilon_sweep(p, 0.0, {0.9, 0.5, 0.0})) CHECK(r.negative_count == 0);
}

TEST_CASE("tail exponents solve the indicial equation") {
  for (int d : {3, 4, 5}) {
    for (double b1 : {0.0, 0.75, 2.0}) {
      const auto shape = PotentialSpec::inverse_square_tail(b1 > 0 ? b1 : 1e-300, 1.0);
      const auto te = tail_exponents(shape, d, 0);
      REQUIRE(te.has_value());
      const double s = te->decaying;
      CHECK(s * (s - (d - 2)) == doctest::Approx(b1).epsilon(1e-12));
      CHECK(s == doctest::Approx((d - 2) / 2.0 + std::sqrt((d - 2) * (d - 2) / 4.0 + b1)));
    }
  }
  CHECK_FALSE(tail_exponents(PotentialSpec::inverse_power_tail(1.0, 1.5, 1.0), 3, 0).has_value());
}

TEST_CASE("decay fit on an exact power law") {
  ZeroEnergySolution sol;
  sol.d = 3;
  for (int k = 0; k <= 400; ++k) {
    const double r = std::pow(10.0, 0.5 + k / 100.0);
    sol.r.push_back(r);
    sol.log_abs_psi.push_back(-2.5 * std::log(r) + 0.3);
    sol.sign.push_back(1);
  }
  const auto fit = fit_decay_exponent(sol, 10.0, 1e3);
  CHECK(fit.s == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(fit.classification == hardy::Classification::eigenvalue);
  CHECK_FALSE(fit.rejected);
  CHECK_FALSE(fit.short_window);
  CHECK(fit_decay_exponent(sol, 10.0, 50.0).short_window);

  sol.sign[200] = -1;
  CHECK_THROWS_AS(fit_decay_exponent(sol, 10.0, 1e3), FitError);
  CHECK_THROWS_AS(fit_decay_exponent(sol, 1e5, 1e6), FitError);
}

TEST_CASE("zero-energy solutions of the critical square well") {
  const auto well = PotentialSpec::square_well(1.0, 1.0);
  SUBCASE("d = 3 decays like 1/r") {
    const double lambda = refine_critical_coupling(well, 3, 2.47, 1e3).lambda_star;
    const auto sol = zero_energy_solution(well, 3, lambda, {1e-2, 1e3});
    CHECK_FALSE(sol.growth_flag);
    const auto fit = fit_decay_exponent(sol, 10.0, 1e3, 0.05);
    CHECK(fit.s == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(fit.classification == hardy::Classification::resonance);
  }
  SUBCASE("d = 5 decays like r^-3") {
    const double lambda = refine_critical_coupling(well, 5, 9.87, 1e3).lambda_star;
    const auto sol = zero_energy_solution(well, 5, lambda, {1e-2, 1e3});
    const auto fit = fit_decay_exponent(sol, 10.0, 1e3, 0.05);
    CHECK(fit.s == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(fit.classification == hardy::Classification::eigenvalue);
  }
  SUBCASE("off-critical coupling is flagged") {
    const auto sol = zero_energy_solution(well, 3, 0.9 * kPi * kPi / 4.0, {1e-2, 1e3});
    CHECK(sol.growth_flag);
  }
}

TEST_CASE("decay fits are grid-stable") {
  const auto tail = PotentialSpec::inverse_square_tail(2.0, 1.0);
  const double guess = critical_coupling(tail, 3, {200.0, 20000}).lambda_star;
  double s[2], se[2];
  for (int k = 0; k < 2; ++k) {
    const double r_hi = 1e3 * (1 << k);
    const double lambda = refine_critical_coupling(tail, 3, guess, r_hi).lambda_star;
    const auto fit = fit_decay_exponent(zero_energy_solution(tail, 3, lambda, {1e-2, r_hi}), 10.0, 1e3, 0.05);
    s[k] = fit.s;
    se[k] = fit.stderr_s;
  }
  CHECK(std::abs(s[1] - s[0]) < std::max(std::max(se[0], se[1]), 1e-4));
  CHECK(s[0] == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("critical inverse-square model") {
  for (double log_r : {std::log(1e2), std::log(1e4)}) CHECK(critical_model_count(0.0, log_r) == 0);

  const auto sub = count_negative_eigenvalues_critical_model(0.16, {1e2, 1e3, 1e4});
  CHECK(sub[1].count == sub[2].count);

  std::vector<double> lr;
  for (int k = 2; k <= 30; ++k) lr.push_back(k * std::log(10.0));
  const auto grow = count_negative_eigenvalues_critical_model_log(1.0, lr);
  CHECK(grow.back().count > grow.front().count);
  const double slope = count_slope(grow);
  const double oracle = std::sqrt(0.75) / kPi;
  CHECK(std::abs(slope / oracle - 1.0) < 0.2);

  const auto br = bracket_hardy_threshold(0.2, 0.3);
  CHECK(br.lo >= 0.2);
  CHECK(br.hi <= 0.3);
  CHECK(br.lo < br.hi);
  CHECK(br.lo <= 0.25 + 1e-3);
  CHECK(br.hi >= 0.25 - 1e-3);
  CHECK_THROWS_AS(bracket_hardy_threshold(0.3, 0.4), BracketingError);
}
