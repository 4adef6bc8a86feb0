#include "vlab/report/runner.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>
#include <sstream>

#include "vlab/cutoffs.hpp"
#include "vlab/errors.hpp"
#include "vlab/geometry.hpp"
#include "vlab/hardy.hpp"
#include "vlab/report/serialize.hpp"
#include "vlab/report/svg.hpp"
#include "vlab/spectral.hpp"

namespace vlab::report {

using ojson = nlohmann::ordered_json;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::expected_fail: return "expected_fail";
    case Status::unexpected_pass: return "unexpected_pass";
    case Status::error: return "error";
  }
  return "unknown";
}

namespace {

// Independent sub-seeds for the checks of one scenario (splitmix64 finaliser).
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t z = seed;
  for (std::uint64_t v : {a, b, c}) {
    z += 0x9e3779b97f4a7c15ull + v;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
  }
  return z;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void check(ScenarioResult& r, std::string name, bool passed, std::string detail) {
  r.assertions.push_back({std::move(name), passed, std::move(detail)});
}

ojson potential_json(const spectral::PotentialSpec& p) {
  ojson j;
  j["shape"] = spectral::to_string(p.shape);
  switch (p.shape) {
    case spectral::Shape::square_well:
      j["depth"] = p.depth;
      j["radius"] = p.radius;
      break;
    case spectral::Shape::gaussian:
      j["depth"] = p.depth;
      j["width"] = p.width;
      break;
    default:
      j["beta1"] = p.beta1;
      j["beta2"] = p.beta2;
      j["inner_radius"] = p.inner_radius;
  }
  return j;
}

// ---------------------------------------------------------------------------

void run(ScenarioResult& r, const GeometryIdentitiesParams& p, std::uint64_t seed) {
  ojson suites = ojson::array();
  double worst[3] = {0, 0, 0};
  for (int n_particles : p.particles) {
    for (int dim : p.dims) {
      const auto rep = geometry::identity_suite(n_particles, dim, p.draws, p.mass_lo, p.mass_hi,
                                                sub_seed(seed, static_cast<std::uint64_t>(n_particles),
                                                         static_cast<std::uint64_t>(dim)));
      suites.push_back({{"particles", n_particles},
                        {"dim", dim},
                        {"draws", rep.draws},
                        {"internal", rep.internal},
                        {"centre_of_mass", rep.centre_of_mass},
                        {"merge", rep.merge}});
      worst[0] = std::max(worst[0], rep.internal);
      worst[1] = std::max(worst[1], rep.centre_of_mass);
      worst[2] = std::max(worst[2], rep.merge);
    }
  }
  r.payload["tolerance"] = p.tolerance;
  r.payload["suites"] = std::move(suites);
  const char* names[3] = {"internal pair-sum identity", "centre-of-mass pair-sum identity", "reduced-mass merge identity"};
  for (int k = 0; k < 3; ++k)
    check(r, names[k], worst[k] <= p.tolerance, "worst relative defect " + fmt(worst[k]));
}

void run(ScenarioResult& r, const ConeSeparationParams& p, std::uint64_t seed) {
  const geometry::MassSystem sys(p.dim, p.masses);
  const int n = sys.particles();
  const int l_max = p.l_max > 0 ? p.l_max : n - 1;
  auto ladder = geometry::azs_ladder(sys, l_max, p.kappa1, p.kappa1_prime);
  if (p.corrupt)
    for (int l = 2; l <= l_max; ++l) ladder = ladder.with_kappa_scaled(l, p.corrupt->factor);

  r.payload["system"] = {{"particles", n}, {"dim", p.dim}, {"masses", p.masses}};
  if (p.corrupt) r.payload["corrupt_factor"] = p.corrupt->factor;
  ojson rungs = ojson::array();
  for (const auto& rung : ladder.rungs())
    rungs.push_back({{"l", rung.l},
                     {"kappa", rung.kappa},
                     {"kappa_prime", rung.kappa_prime},
                     {"d", rung.d ? ojson(*rung.d) : ojson(nullptr)}});
  r.payload["ladder"] = std::move(rungs);

  ojson ineq = ojson::array();
  bool all_hold = true;
  for (int l = 2; l <= l_max; ++l) {
    const auto q = geometry::rung_inequality(sys, ladder, l);
    all_hold = all_hold && q.holds();
    ineq.push_back({{"l", l}, {"left", q.left}, {"d_sq", q.d_sq}, {"right", q.right}, {"holds", q.holds()}});
  }
  r.payload["inequalities"] = std::move(ineq);
  check(r, "ladder double inequality", all_hold, "rungs 2.." + std::to_string(l_max));

  ojson checks = ojson::array();
  if (p.separation) {
    long violations = 0, pairs = 0, intersection = 0;
    ojson absorbed = ojson::array();
    for (int l = 2; l <= l_max; ++l) {
      const auto parts = geometry::partitions_of_order(n, l);
      std::map<std::string, long> hist;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::size_t j = i + 1; j < parts.size(); ++j) {
          const auto rep = geometry::check_cone_separation(sys, parts[i], parts[j], ladder, p.samples,
                                                           sub_seed(seed, 1, static_cast<std::uint64_t>(l), i * 1000 + j));
          ++pairs;
          violations += rep.violations + rep.intersection_violations;
          intersection += rep.intersection_samples;
          for (const auto& [label, count] : rep.absorbed) hist[label] += count;
          checks.push_back({{"name", "separation " + parts[i].label() + " " + parts[j].label()},
                            {"samples", rep.samples},
                            {"violations", rep.violations + rep.intersection_violations},
                            {"worst_margin", rep.worst_margin},
                            {"in_both", rep.in_both},
                            {"intersection_is_origin", rep.intersection_is_origin},
                            {"intersection_samples", rep.intersection_samples}});
        }
      }
      ojson h = ojson::object();
      for (const auto& [label, count] : hist) h[label] = count;
      absorbed.push_back({{"l", l}, {"absorbed_by", std::move(h)}});
    }
    r.payload["absorbed"] = std::move(absorbed);
    check(r, "cone separation", violations == 0,
          std::to_string(violations) + " violations over " + std::to_string(pairs) + " pairs, " +
              std::to_string(intersection) + " targeted intersection points");
  }
  if (p.lower_bound) {
    long violations = 0, runs = 0, exhausted = 0;
    for (int l = 2; l <= std::min(l_max, n - 1); ++l) {
      const auto parts = geometry::partitions_of_order(n, l);
      for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto& z = parts[k];
        // First pair of particles split by z.
        std::vector<int> pair;
        for (int a = 0; a < n && pair.empty(); ++a)
          for (int b = a + 1; b < n; ++b)
            if (z.cluster_of(a) != z.cluster_of(b)) {
              pair = {a, b};
              break;
            }
        const geometry::Cluster c(pair);
        ++runs;
        try {
          const auto rep = geometry::check_internal_lower_bound(sys, z, c, ladder, p.lower_bound_samples,
                                                                sub_seed(seed, 2, static_cast<std::uint64_t>(l), k));
          violations += rep.violations;
          checks.push_back({{"name", "lower bound " + z.label() + " " + c.label()},
                            {"samples", rep.samples},
                            {"violations", rep.violations},
                            {"worst_margin", rep.worst_ratio - 1.0}});
        } catch (const SamplingExhausted& e) {
          ++exhausted;
          checks.push_back({{"name", "lower bound " + z.label() + " " + c.label()},
                            {"samples", e.accepted()},
                            {"violations", nullptr},
                            {"worst_margin", nullptr},
                            {"exhausted", true}});
        }
      }
    }
    check(r, "internal lower bound", violations == 0 && exhausted == 0,
          std::to_string(violations) + " violations over " + std::to_string(runs) + " shells" +
              (exhausted ? ", " + std::to_string(exhausted) + " exhausted" : std::string()));
  }
  r.payload["checks"] = std::move(checks);
}

void run(ScenarioResult& r, const ImsVerifyParams& p, std::uint64_t seed) {
  const geometry::MassSystem sys(p.dim, p.masses);
  const auto z = geometry::parse_partition(p.partition, sys.particles());
  ojson rows = ojson::array();
  for (std::size_t k = 0; k < p.epsilons.size(); ++k) {
    const double eps = p.epsilons[k];
    const std::string tag = " eps=" + fmt(eps);
    auto radial = cutoffs::build_radial_cutoff(eps, p.b, p.d);
    auto cone = cutoffs::build_cone_cutoff(sys, z, eps, p.kappa);
    if (p.corrupt) {
      radial = radial.with_log_b_tilde(radial.log_b_tilde() - std::numbers::ln2);
      const double log_second = std::log(cone.kappa_second());
      cone = cone.with_log_kappa_prime(log_second - 0.01 * (log_second - cone.log_kappa_prime()));
    }
    const auto rb = cutoffs::verify_radial_bound(radial, p.radial_grid);
    const auto rc = cutoffs::check_radial_consistency(radial, p.radial_grid);
    const auto cb = cutoffs::verify_cone_bound(cone, p.cone_samples, sub_seed(seed, 1, k));
    const auto cc = cutoffs::check_cone_consistency(cone, p.consistency_samples, sub_seed(seed, 2, k));

    ojson gauss = ojson::array();
    bool gauss_ok = true;
    if (p.d == 3) {
      for (double w : p.gaussian_widths) {
        const auto li = cutoffs::gaussian_localization_error(radial, w);
        gauss_ok = gauss_ok && li.lhs <= li.rhs;
        gauss.push_back({{"width", w}, {"lhs", li.lhs}, {"rhs", li.rhs}});
      }
    }
    rows.push_back({{"epsilon", eps},
                    {"radial",
                     {{"b", radial.b()},
                      {"b_prime", radial.b_prime()},
                      {"log_b_tilde", radial.log_b_tilde()},
                      {"theta1", radial.theta1()},
                      {"outer_condition", radial.outer_condition()},
                      {"max_ratio", rb.max_ratio},
                      {"argmax_log_radius", rb.argmax_log_radius},
                      {"unity_error", rc.max_unity_error},
                      {"derivative_error", rc.max_derivative_error},
                      {"derivative_points", rc.derivative_points},
                      {"gaussian", std::move(gauss)}}},
                    {"cone",
                     {{"partition", z.label()},
                      {"kappa", cone.kappa()},
                      {"kappa_second", cone.kappa_second()},
                      {"log_kappa_prime", cone.log_kappa_prime()},
                      {"phi_span", cone.phi_span()},
                      {"log_part_condition", cone.log_part_condition()},
                      {"samples", cb.samples},
                      {"configurations", cb.configurations},
                      {"max_defect", cb.max_defect},
                      {"argmax_log_t", cb.argmax_log_t},
                      {"unity_error", cc.max_unity_error},
                      {"derivative_error", cc.max_derivative_error},
                      {"derivative_points", cc.derivative_points}}}});

    check(r, "radial bound" + tag, rb.max_ratio <= 1.0 + p.bound_tolerance, "max ratio " + fmt(rb.max_ratio));
    check(r, "cone bound" + tag, cb.max_defect <= 1.0 + p.bound_tolerance, "max defect " + fmt(cb.max_defect));
    const double unity = std::max(rc.max_unity_error, cc.max_unity_error);
    check(r, "partition of unity" + tag, unity <= p.unity_tolerance, "max error " + fmt(unity));
    const double deriv = std::max(rc.max_derivative_error, cc.max_derivative_error);
    check(r, "analytic derivatives" + tag, deriv <= p.derivative_tolerance, "max relative error " + fmt(deriv));
    if (p.d == 3) check(r, "gaussian localisation" + tag, gauss_ok, "lhs <= eps/hardy_constant(3) ||grad psi||^2");
  }
  r.payload["epsilons"] = std::move(rows);
}

void run(ScenarioResult& r, const FermionHardyParams& p) {
  const hardy::RadialGrid grid{p.rho0, p.rho1, p.points, p.boundary};
  const auto res = hardy::fermion1d_constant_check(grid, p.modes);
  r.payload["grid"] = {{"rho0", p.rho0},
                       {"rho1", p.rho1},
                       {"points", p.points},
                       {"boundary", p.boundary == hardy::RadialBoundary::free ? "free" : "dirichlet"}};
  r.payload["modes"] = p.modes;
  r.payload["min_rayleigh"] = res.min_rayleigh;
  r.payload["minimizing_mode"] = res.minimizing_mode;
  r.payload["joint_minimum"] = res.joint_minimum;
  r.payload["mode_minimum"] = res.mode_minimum;

  const double lo = p.expected * (1.0 - p.rel_tol), hi = p.expected * (1.0 + p.rel_tol);
  check(r, "constant", res.min_rayleigh >= lo && res.min_rayleigh <= hi,
        fmt(res.min_rayleigh) + " in [" + fmt(lo) + ", " + fmt(hi) + "]");
  check(r, "minimising mode", res.minimizing_mode == 1, "n = " + std::to_string(res.minimizing_mode));
  bool increasing = true;
  for (std::size_t k = 1; k < res.mode_minimum.size(); ++k)
    increasing = increasing && res.mode_minimum[k] > res.mode_minimum[k - 1];
  check(r, "mode minima increase with n", increasing, std::to_string(res.mode_minimum.size()) + " modes");
  const double gap = std::abs(res.joint_minimum - res.min_rayleigh) / res.min_rayleigh;
  check(r, "joint minimum agrees", gap <= 1e-9, "relative gap " + fmt(gap));
}

void run(ScenarioResult& r, const VirtualLevelParams& p) {
  const auto cc = spectral::critical_coupling(p.potential, p.d, p.grid, p.l);
  spectral::RadialProblem problem{p.d, p.potential.with_coupling(cc.lambda_star), 0.0, p.grid, p.l};
  const auto at_critical = spectral::analyze(problem);

  r.payload["d"] = p.d;
  r.payload["l"] = p.l;
  r.payload["potential"] = potential_json(p.potential);
  r.payload["grid"] = {{"r_max", p.grid.r_max}, {"points", p.grid.points}};
  r.payload["lambda_star"] = cc.lambda_star;
  r.payload["bracket"] = {cc.bracket.first, cc.bracket.second};
  r.payload["ground_energy"] = cc.ground_energy;
  r.payload["witness_epsilon"] = cc.witness_epsilon;
  r.payload["witness_energy"] = cc.witness_energy;
  r.payload["negative_count"] = at_critical.negative_count;

  check(r, "critical ground energy", cc.ground_energy >= -p.energy_tol && cc.ground_energy <= 0.0,
        fmt(cc.ground_energy) + " in [" + fmt(-p.energy_tol) + ", 0]");
  check(r, "epsilon witness binds", cc.witness_energy < 0.0, "E = " + fmt(cc.witness_energy));
  if (p.oracle_lambda) {
    const double rel = std::abs(cc.lambda_star - *p.oracle_lambda) / *p.oracle_lambda;
    r.payload["oracle_lambda"] = *p.oracle_lambda;
    r.payload["relative_error"] = rel;
    check(r, "critical coupling vs oracle", rel <= p.rel_tol, "relative error " + fmt(rel));
  }
  if (p.sweep_n_max >= 2) {
    std::vector<double> eps;
    for (int n = 2; n <= p.sweep_n_max; ++n) eps.push_back(1.0 / n);
    const auto sweep = spectral::epsilon_sweep(problem, cc.lambda_star, eps);
    ojson rows = ojson::array();
    bool negative = true, increasing = true;
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      negative = negative && sweep[k].ground_energy < 0.0;
      if (k > 0) increasing = increasing && sweep[k].ground_energy > sweep[k - 1].ground_energy;
      rows.push_back({{"epsilon", sweep[k].epsilon},
                      {"ground_energy", sweep[k].ground_energy},
                      {"negative_count", sweep[k].negative_count}});
    }
    r.payload["sweep"] = std::move(rows);
    check(r, "sweep energies negative", negative, std::to_string(sweep.size()) + " values of epsilon");
    check(r, "sweep energies increase as epsilon decreases", increasing, "epsilon = 1/n, n = 2.." +
                                                                             std::to_string(p.sweep_n_max));
  }
  r.summary = {p.d, std::string(spectral::to_string(p.potential.shape)), cc.lambda_star, 0.0, cc.ground_energy,
               at_critical.negative_count, std::nullopt, ""};
}

void run(ScenarioResult& r, const DecayFitParams& p) {
  const auto cc = spectral::critical_coupling(p.potential, p.d, p.grid, p.l);
  const auto shoot = spectral::refine_critical_coupling(p.potential, p.d, cc.lambda_star, p.match_radius, p.l);
  const double r_end = std::max(p.r_hi, p.match_radius);
  const auto sol = spectral::zero_energy_solution(p.potential, p.d, shoot.lambda_star,
                                                  {1e-2 * p.potential.scale(), r_end}, p.l, 0.0, p.samples_per_decade);
  const auto fit = spectral::fit_decay_exponent(sol, p.r_lo, p.r_hi, p.marginal_tol);
  const auto exps = spectral::tail_exponents(p.potential, p.d, p.l);

  r.payload["d"] = p.d;
  r.payload["l"] = p.l;
  r.payload["potential"] = potential_json(p.potential);
  r.payload["box_lambda_star"] = cc.lambda_star;
  r.payload["lambda_star"] = shoot.lambda_star;
  r.payload["match_radius"] = p.match_radius;
  r.payload["window"] = {p.r_lo, p.r_hi};
  r.payload["s"] = fit.s;
  r.payload["stderr_s"] = fit.stderr_s;
  r.payload["max_residual"] = fit.max_residual;
  r.payload["points"] = fit.points;
  r.payload["short_window"] = fit.short_window;
  r.payload["rejected"] = fit.rejected;
  r.payload["growth_fraction"] = sol.growth_fraction;
  r.payload["renormalisations"] = sol.renormalisations;
  r.payload["classification"] = hardy::to_string(fit.classification);
  if (exps) r.payload["indicial_s"] = exps->decaying;

  check(r, "fit accepted", !fit.rejected, "max residual " + fmt(fit.max_residual));
  check(r, "growing mode suppressed", !sol.growth_flag, "growth fraction " + fmt(sol.growth_fraction));
  check(r, "window spans a decade", !fit.short_window, "[" + fmt(p.r_lo) + ", " + fmt(p.r_hi) + "]");
  if (p.expected_s)
    check(r, "decay exponent", std::abs(fit.s - *p.expected_s) <= p.s_tol,
          "s = " + fmt(fit.s) + ", expected " + fmt(*p.expected_s) + " +- " + fmt(p.s_tol));
  if (p.expected_classification)
    check(r, "classification", fit.classification == *p.expected_classification,
          std::string(hardy::to_string(fit.classification)));

  // The weight (1 + |x|)^(alpha - 1) keeps psi in L^2 up to alpha = s + 1 - d/2;
  // for l = 0 that edge should coincide with the analytic supremum.
  if (p.l == 0) {
    hardy::DecayQuery q;
    q.d = p.d;
    if (p.potential.has_tail() && p.potential.beta1 != 0.0) {
      q.mode = p.potential.beta2 == 2.0 ? hardy::DecayMode::one_body_long_range_critical
                                        : hardy::DecayMode::one_body_long_range_subcritical;
      q.beta1 = p.potential.beta1;
      q.beta2 = p.potential.beta2;
    }
    const auto bound = hardy::decay_bound(q);
    const double edge = hardy::weighted_l2_threshold(p.d, fit.s);
    r.payload["weight_threshold"] = edge;
    if (bound.alpha_sup) {
      r.payload["alpha_sup"] = *bound.alpha_sup;
      check(r, "weight threshold matches alpha_sup", std::abs(edge - *bound.alpha_sup) <= p.s_tol,
            fmt(edge) + " vs " + fmt(*bound.alpha_sup));
    }
  }

  r.summary = {p.d, std::string(spectral::to_string(p.potential.shape)), shoot.lambda_star, 0.0, std::nullopt,
               std::nullopt, fit.s, std::string(hardy::to_string(fit.classification))};

  Plot plot{r.name + ": zero-energy solution", "log10 r", "log10 |psi|", {}};
  Series data{"psi", {}, {}, false};
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    if (!std::isfinite(sol.log_abs_psi[i])) continue;
    data.x.push_back(std::log10(sol.r[i]));
    data.y.push_back(sol.log_abs_psi[i] / std::numbers::ln10);
  }
  // Fit line through the window, anchored at the sample nearest to r_lo.
  double anchor = 0.0;
  for (std::size_t i = 0; i < sol.r.size(); ++i)
    if (sol.r[i] >= p.r_lo) {
      anchor = sol.log_abs_psi[i] / std::numbers::ln10 + fit.s * std::log10(sol.r[i]);
      break;
    }
  Series line{"fit s = " + fmt(fit.s), {std::log10(p.r_lo), std::log10(p.r_hi)}, {}, false};
  for (double x : line.x) line.y.push_back(anchor - fit.s * x);
  plot.series = {std::move(data), std::move(line)};
  r.plots.push_back(std::move(plot));
}

void run(ScenarioResult& r, const EfimovCountParams& p) {
  if (p.c) {
    const double c = *p.c;
    const auto counts = spectral::count_negative_eigenvalues_critical_model_log(c, p.log_r, p.step);
    ojson rows = ojson::array();
    for (const auto& k : counts) rows.push_back({{"log_r", k.log_r}, {"count", k.count}});
    r.payload["c"] = c;
    r.payload["step"] = p.step;
    r.payload["counts"] = std::move(rows);
    const double expected = c > 0.25 ? std::sqrt(c - 0.25) / std::numbers::pi : 0.0;
    r.payload["asymptotic_slope"] = expected;
    std::optional<double> slope;
    if (counts.size() >= 2) {
      slope = spectral::count_slope(counts);
      r.payload["slope"] = *slope;
    }
    if (p.expect == EfimovCountParams::Expect::saturate) {
      const bool same = counts.size() >= 2 && counts.back().count == counts[counts.size() - 2].count;
      check(r, "counts saturate", same,
            counts.size() >= 2 ? std::to_string(counts[counts.size() - 2].count) + " -> " +
                                     std::to_string(counts.back().count)
                               : "need two radii");
    } else if (p.expect == EfimovCountParams::Expect::grow) {
      const bool ok = slope && expected > 0.0 && std::abs(*slope / expected - 1.0) <= p.slope_rel_tol;
      check(r, "logarithmic growth", ok,
            "slope " + (slope ? fmt(*slope) : std::string("n/a")) + " vs " + fmt(expected));
    }
    Plot plot{r.name + ": negative eigenvalues", "ln R", "count", {}};
    Series data{"Sturm count", {}, {}, true};
    for (const auto& k : counts) {
      data.x.push_back(k.log_r);
      data.y.push_back(static_cast<double>(k.count));
    }
    Series law{"sqrt(c - 1/4) ln R / pi", {counts.front().log_r, counts.back().log_r}, {}, false};
    for (double x : law.x) law.y.push_back(expected * x);
    plot.series = {std::move(data), std::move(law)};
    r.plots.push_back(std::move(plot));
  }
  if (p.threshold) {
    const auto& t = *p.threshold;
    const auto b = spectral::bracket_hardy_threshold(t.c_lo, t.c_hi, t.log_r1, t.log_r2, t.tol);
    r.payload["threshold"] = {{"lo", b.lo}, {"hi", b.hi}, {"iterations", b.iterations},
                              {"log_r1", t.log_r1}, {"log_r2", t.log_r2}};
    check(r, "threshold bracketed", b.lo >= t.c_lo && b.hi <= t.c_hi,
          "[" + fmt(b.lo) + ", " + fmt(b.hi) + "] inside [" + fmt(t.c_lo) + ", " + fmt(t.c_hi) + "]");
  }
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s) {
  ScenarioResult r;
  r.name = s.name;
  r.kind = s.kind;
  r.seed = s.seed;
  r.expect_fail = s.expect_fail;
  r.output = s.output;
  try {
    const std::uint64_t seed = s.seed.value_or(0);
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, GeometryIdentitiesParams> || std::is_same_v<P, ConeSeparationParams> ||
                        std::is_same_v<P, ImsVerifyParams>)
            run(r, p, seed);
          else
            run(r, p);
        },
        s.parameters);
  } catch (const std::exception& e) {
    r.error = e.what();
    r.status = Status::error;
    return r;
  }
  bool passed = true;
  for (const auto& a : r.assertions) passed = passed && a.passed;
  if (s.expect_fail)
    r.status = passed ? Status::unexpected_pass : Status::expected_fail;
  else
    r.status = passed ? Status::pass : Status::fail;
  return r;
}

int run_config(const Config& config, const RunOptions& options, std::ostream& log) {
  namespace fs = std::filesystem;
  fs::create_directories(options.out_dir);
  std::ofstream summary(options.out_dir / "summary.csv", std::ios::binary | std::ios::trunc);
  if (!summary) throw std::runtime_error("cannot write " + (options.out_dir / "summary.csv").string());
  summary << kSummaryHeader << '\n' << std::flush;

  const auto& sc = config.scenarios;
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  std::vector<std::future<ScenarioResult>> pending(sc.size());
  std::size_t launched = 0;
  bool all_ok = true;
  for (std::size_t i = 0; i < sc.size(); ++i) {
    while (launched < sc.size() && launched < i + jobs) {
      pending[launched] = std::async(std::launch::async, run_scenario, std::cref(sc[launched]));
      ++launched;
    }
    const ScenarioResult r = pending[i].get();
    all_ok = all_ok && r.ok();

    std::ofstream out(options.out_dir / (r.output + ".json"), std::ios::binary | std::ios::trunc);
    out << report_json(r);
    const auto row = summary_csv({r});
    summary << row.substr(row.find('\n') + 1) << std::flush;
    if (options.plots) {
      for (std::size_t k = 0; k < r.plots.size(); ++k) {
        const std::string suffix = r.plots.size() == 1 ? "" : "_" + std::to_string(k + 1);
        std::ofstream svg(options.out_dir / (r.output + suffix + ".svg"), std::ios::binary | std::ios::trunc);
        svg << render_svg(r.plots[k]);
      }
    }

    log << "[" << (i + 1) << "/" << sc.size() << "] " << r.name << " (" << to_string(r.kind)
        << "): " << to_string(r.status) << '\n';
    if (!r.error.empty()) log << "    error: " << r.error << '\n';
    for (const auto& a : r.assertions)
      if (!a.passed) log << "    failed: " << a.name << " (" << a.detail << ")\n";
    log << std::flush;
  }
  return all_ok ? 0 : 1;
}

}  // namespace vlab::report
