#include "vlab/cutoffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vlab/errors.hpp"
#include "vlab/hardy.hpp"

namespace vlab::cutoffs {

using geometry::Configuration;

// Below this ratio q(Z) drowns in the roundoff of the projection of a unit
// configuration, so checks switch to the closed form in log t.
constexpr double kRepresentableRatio = 1e-8;

double smoothstep(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  return tau * tau * (3.0 - 2.0 * tau);
}

double smoothstep_slope(double tau) {
  if (tau <= 0.0 || tau >= 1.0) return 0.0;
  return 6.0 * tau * (1.0 - tau);
}

namespace {

// max over tau of r psi'(r) / theta1 on the smoothstep part, with c = b / (b' - b):
// 6 tau (1 - tau)(c + tau), maximised at the positive root of 3 tau^2 - 2(1-c) tau - c.
double transition_peak(double c) {
  const double tau = ((1.0 - c) + std::sqrt((1.0 - c) * (1.0 - c) + 3.0 * c)) / 3.0;
  return 6.0 * tau * (1.0 - tau) * (c + tau);
}

// Composite Simpson rule on [a, b] with an even number of intervals.
template <class F>
double simpson(F f, double a, double b, int intervals) {
  if (!(b > a)) return 0.0;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int k = 1; k < intervals; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace

RadialCutoffPair::RadialCutoffPair(double epsilon, double b, double b_prime, double log_b_tilde,
                                   double theta1, int d)
    : epsilon_(epsilon), b_(b), b_prime_(b_prime), log_b_tilde_(log_b_tilde), theta1_(theta1), d_(d) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(b > 0.0) || !(b_prime > b) || !(log_b_tilde > std::log(b_prime)))
    throw ArgumentError("radial cutoff needs 0 < b < b' < b~");
  if (!(theta1 > 0.0) || !(theta1 < std::numbers::pi / 2)) throw ArgumentError("theta1 must lie in (0, pi/2)");
}

double RadialCutoffPair::b_tilde() const { return std::exp(log_b_tilde_); }

double RadialCutoffPair::outer_condition() const {
  const double u1 = std::cos(theta1_);
  const double span = log_b_tilde_ - std::log(b_prime_);
  return u1 * u1 / (1.0 - u1 * u1) / (span * span);
}

RadialValue RadialCutoffPair::evaluate(double r) const {
  RadialValue v;
  if (r <= b_) return v;
  const double log_r = std::log(r);
  if (log_r >= log_b_tilde_) return {0.0, 1.0, 0.0, 0.0};
  double psi = 0.0, dpsi = 0.0;
  if (r < b_prime_) {
    const double w = b_prime_ - b_;
    const double tau = (r - b_) / w;
    psi = theta1_ * smoothstep(tau);
    dpsi = theta1_ * smoothstep_slope(tau) / w;
    v.chi1 = std::cos(psi);
    v.chi2 = std::sin(psi);
  } else {
    const double span = log_b_tilde_ - std::log(b_prime_);
    const double u1 = std::cos(theta1_);
    const double u = u1 * (log_b_tilde_ - log_r) / span;
    v.chi1 = u;
    v.chi2 = std::sqrt((1.0 - u) * (1.0 + u));
    psi = std::acos(u);
    dpsi = u1 / (r * span) / v.chi2;
  }
  v.dchi1 = -v.chi2 * dpsi;
  v.dchi2 = v.chi1 * dpsi;
  return v;
}

double RadialCutoffPair::scaled_gradient_sq(double log_r) const {
  const double log_b = std::log(b_);
  const double log_bp = std::log(b_prime_);
  if (log_r <= log_b || log_r >= log_b_tilde_) return 0.0;
  if (log_r < log_bp) {
    const double r = std::exp(log_r);
    const double w = b_prime_ - b_;
    const double g = r * theta1_ * smoothstep_slope((r - b_) / w) / w;
    return g * g;
  }
  const double span = log_b_tilde_ - log_bp;
  const double u1 = std::cos(theta1_);
  const double u = u1 * (log_b_tilde_ - log_r) / span;
  const double g = u1 / span;
  return g * g / ((1.0 - u) * (1.0 + u));
}

RadialCutoffPair RadialCutoffPair::with_log_b_tilde(double log_b_tilde) const {
  return RadialCutoffPair(epsilon_, b_, b_prime_, log_b_tilde, theta1_, d_);
}

RadialCutoffPair build_radial_cutoff(double epsilon, double b, int d) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(b > 0.0)) throw ArgumentError("inner radius must be positive");
  if (d < 3) throw ArgumentError("radial cutoffs are built for d >= 3");
  // The angle at b' is sqrt(epsilon), so the smoothstep part stays within the
  // bound as long as its scale-free peak 6 tau (1 - tau)(b/(b'-b) + tau) is <= 1.
  const double theta1 = std::min(std::sqrt(epsilon), std::numbers::pi / 4);
  double lo = 0.0, hi = 1.0;  // c = b / (b' - b); peak(0) = 8/9, peak(1) > 1
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (transition_peak(mid) <= 1.0 ? lo : hi) = mid;
  }
  const double b_prime = b * (1.0 + 1.0 / lo);
  // Log part: the bound is tightest at b', where it reads
  // cot^2(theta1) / (epsilon ln^2(b~/b')) <= 1.
  const double span = 1.0 / (std::tan(theta1) * std::sqrt(epsilon));
  return RadialCutoffPair(epsilon, b, b_prime, std::log(b_prime) + span, theta1, d);
}

RadialBoundReport verify_radial_bound(const RadialCutoffPair& pair, int grid_points) {
  return verify_radial_bound(pair, grid_points, std::log(pair.b()) + std::log1p(-1e-6),
                             pair.log_b_tilde() + std::log1p(1e-6));
}

RadialBoundReport verify_radial_bound(const RadialCutoffPair& pair, int grid_points, double log_lo,
                                      double log_hi) {
  if (grid_points < 100) throw ArgumentError("grid_points must be at least 100");
  if (!(log_hi > log_lo)) throw ArgumentError("empty radial grid");
  RadialBoundReport rep;
  rep.argmax_log_radius = log_lo;
  for (int k = 0; k < grid_points; ++k) {
    const double s = log_lo + (log_hi - log_lo) * k / (grid_points - 1);
    const double ratio = pair.bound_ratio(s);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.argmax_log_radius = s;
    }
  }
  rep.argmax_radius = std::exp(rep.argmax_log_radius);
  return rep;
}

LocalizationIntegral gaussian_localization_error(const RadialCutoffPair& pair, double width) {
  if (pair.dimension() != 3) throw ArgumentError("the Gaussian localisation check is set up for d = 3");
  if (!(width > 0.0)) throw ArgumentError("width must be positive");
  // In s = ln r: 4 pi * integral of (r psi')^2 exp(-r^2/w^2) r ds.
  auto integrand = [&](double s) {
    const double r = std::exp(s);
    return pair.scaled_gradient_sq(s) * std::exp(-(r * r) / (width * width)) * r;
  };
  const double log_b = std::log(pair.b());
  const double log_bp = std::log(pair.b_prime());
  const double top = std::min(pair.log_b_tilde(), std::log(12.0 * width));
  double integral = simpson(integrand, log_b, std::min(log_bp, top), 4000);
  integral += simpson(integrand, log_bp, top, 4000);
  LocalizationIntegral out;
  out.lhs = 4.0 * std::numbers::pi * integral;
  const double grad_sq = 1.5 * std::pow(std::numbers::pi, 1.5) * width;
  out.rhs = pair.epsilon() / hardy::hardy_constant(3) * grad_sq;
  return out;
}

// ---------------------------------------------------------------------------

ConeCutoffPair::ConeCutoffPair(geometry::MassSystem sys, geometry::Partition z, double epsilon, double kappa,
                               double kappa_second, double log_kappa_prime, double phi_span)
    : sys_(std::move(sys)),
      z_(std::move(z)),
      epsilon_(epsilon),
      kappa_(kappa),
      kappa_second_(kappa_second),
      log_kappa_prime_(log_kappa_prime),
      phi_span_(phi_span) {
  if (z_.particles() != sys_.particles()) throw ArgumentError("partition does not match the system");
  if (z_.order() <= 1 || z_.order() >= sys_.particles())
    throw ArgumentError("cone cutoffs need 1 < |Z| < N, got " + z_.label());
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(kappa_second > 0.0) || !(kappa_second < kappa) || !(log_kappa_prime < std::log(kappa_second)))
    throw ArgumentError("cone cutoff needs 0 < kappa' < kappa'' < kappa");
  if (!(phi_span > 0.0) || !(phi_span < std::numbers::pi / 2)) throw ArgumentError("phi_span must lie in (0, pi/2)");
}

double ConeCutoffPair::kappa_prime() const { return std::exp(log_kappa_prime_); }

double ConeCutoffPair::v_second() const { return std::cos(phi_span_); }

ConeCutoffPair::Profile ConeCutoffPair::profile(double log_t) const {
  const double log_k2 = std::log(kappa_second_);
  if (log_t < log_kappa_prime_) return {0.0, 0.0};
  if (log_t < log_k2) {
    const double slope = v_second() / (log_k2 - log_kappa_prime_);
    const double v = slope * (log_t - log_kappa_prime_);
    return {std::asin(v), slope / std::sqrt((1.0 - v) * (1.0 + v))};
  }
  const double t = std::exp(log_t);
  if (t >= kappa_) return {std::numbers::pi / 2, 0.0};
  const double w = kappa_ - kappa_second_;
  const double tau = (t - kappa_second_) / w;
  return {std::numbers::pi / 2 - phi_span_ * (1.0 - smoothstep(tau)), t * phi_span_ * smoothstep_slope(tau) / w};
}

double ConeCutoffPair::defect(double log_t) const {
  const auto p = profile(log_t);
  if (p.dpsi_ds == 0.0) return 0.0;
  const double t2 = log_t < -300.0 ? 0.0 : std::exp(2.0 * log_t);
  double u2 = 0.0, v2 = 0.0;
  if (log_t < std::log(kappa_second_)) {
    const double v = v_second() * (log_t - log_kappa_prime_) / (std::log(kappa_second_) - log_kappa_prime_);
    v2 = v * v;
    u2 = (1.0 - v) * (1.0 + v);
  } else {
    const double c = std::sin(phi_span_ * (1.0 - smoothstep((std::sqrt(t2) - kappa_second_) / (kappa_ - kappa_second_))));
    u2 = c * c;
    v2 = 1.0 - u2;
  }
  return p.dpsi_ds * p.dpsi_ds * (1.0 + t2) / (epsilon_ * (v2 * t2 / (1.0 + t2) + u2));
}

ConeValue ConeCutoffPair::evaluate(const Configuration& x) const {
  const auto split = geometry::project_partition(sys_, z_, x);
  const double qn = geometry::mass_norm(sys_, split.q);
  const double xn = geometry::mass_norm(sys_, split.xi);
  ConeValue out;
  out.grad_u = Configuration::zeros(sys_);
  out.grad_v = Configuration::zeros(sys_);
  if (xn == 0.0) {
    out.t = std::numeric_limits<double>::infinity();
    out.u = 0.0;
    out.v = 1.0;
    return out;
  }
  out.t = qn / xn;
  if (qn == 0.0) return out;
  if (out.t >= kappa_) {
    out.u = 0.0;
    out.v = 1.0;
    return out;
  }
  const auto p = profile(std::log(out.t));
  out.u = std::cos(p.psi);
  out.v = std::sin(p.psi);
  if (p.dpsi_ds == 0.0) return out;
  // grad t = q / (|q||xi|) - |q| xi / |xi|^3 and d psi / dt = (d psi / d ln t) / t.
  const double dpsi_dt = p.dpsi_ds / out.t;
  Configuration grad_t = (1.0 / (qn * xn)) * split.q - (qn / (xn * xn * xn)) * split.xi;
  out.grad_u = (-out.v * dpsi_dt) * grad_t;
  out.grad_v = (out.u * dpsi_dt) * std::move(grad_t);
  return out;
}

double ConeCutoffPair::log_part_condition() const {
  const double ve = v_second();
  const double s = std::sin(phi_span_);
  const double span = std::log(kappa_second_) - log_kappa_prime_;
  return ve * ve * (1.0 + kappa_second_ * kappa_second_) / (s * s * s * s * span * span);
}

ConeCutoffPair ConeCutoffPair::with_log_kappa_prime(double log_kappa_prime) const {
  return ConeCutoffPair(sys_, z_, epsilon_, kappa_, kappa_second_, log_kappa_prime, phi_span_);
}

ConeCutoffPair build_cone_cutoff(const geometry::MassSystem& sys, const geometry::Partition& z, double epsilon,
                                 double kappa) {
  if (!(kappa > 0.0)) throw ArgumentError("kappa must be positive");
  const double kappa_second = 0.5 * kappa;
  // Smoothstep part: |d psi/dt| <= 1.5 phi_span / (kappa - kappa''), and the
  // defect there is at most (d psi/dt)^2 (1 + kappa^2)^2 / epsilon.
  const double phi_span =
      std::min(std::sqrt(epsilon) * (kappa - kappa_second) / (1.5 * (1.0 + kappa * kappa)), std::numbers::pi / 4);
  // Log part: the defect is at most v_e^2 (1 + kappa''^2) / ((1 - v_e^2)^2 eps ln^2(kappa''/kappa')).
  const double ve = std::cos(phi_span);
  const double s = std::sin(phi_span);
  const double span = ve * std::sqrt(1.0 + kappa_second * kappa_second) / (s * s * std::sqrt(epsilon));
  return ConeCutoffPair(sys, z, epsilon, kappa, kappa_second, std::log(kappa_second) - span, phi_span);
}

ConeBoundReport verify_cone_bound(const ConeCutoffPair& pair, long samples, std::uint64_t seed) {
  if (samples < 1000) throw ArgumentError("verify_cone_bound needs at least 1000 samples");
  const double log_kp = pair.log_kappa_prime();
  const double log_k2 = std::log(pair.kappa_second());
  const double log_k = std::log(pair.kappa());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto& sys = pair.system();

  ConeBoundReport rep;
  auto visit = [&](double log_t) {
    ++rep.samples;
    double d = 0.0;
    if (log_t > std::log(kRepresentableRatio)) {
      ++rep.configurations;
      const auto x = geometry::ratio_point(sys, pair.partition(), std::exp(log_t), rng);
      const auto cv = pair.evaluate(x);
      const auto n = geometry::split_norms(sys, pair.partition(), x);
      const double num = geometry::mass_inner(sys, cv.grad_u, cv.grad_u) + geometry::mass_inner(sys, cv.grad_v, cv.grad_v);
      const double target = pair.epsilon() * (cv.v * cv.v / (n.q_sq + n.xi_sq) + cv.u * cv.u / n.q_sq);
      d = num / target;
    } else {
      d = pair.defect(log_t);
    }
    if (d > rep.max_defect) {
      rep.max_defect = d;
      rep.argmax_log_t = log_t;
    }
  };
  for (double s : {log_kp, log_k2, log_k}) visit(s);
  for (long k = 0; k < samples; ++k) {
    if (k % 2 == 0)
      visit(log_kp + (log_k2 - log_kp) * unif(rng));
    else
      visit(std::log(pair.kappa_second() + (pair.kappa() - pair.kappa_second()) * unif(rng)));
  }
  return rep;
}

namespace {

// Distance in the log variable to the nearest joint.
double joint_gap(double s, std::initializer_list<double> joints) {
  double gap = std::numeric_limits<double>::infinity();
  for (double j : joints) gap = std::min(gap, std::abs(s - j));
  return gap;
}

// Relative difference step: 1e-6 where the angle moves at unit rate per
// e-fold, widened up to 1e-3 where it barely moves so that roundoff in
// cos/sin stays below the truncation error, but kept well inside the
// distance to the nearest joint.
double difference_step(double dpsi_ds, double gap) {
  const double step = std::clamp(1e-6 / std::max(std::abs(dpsi_ds), 1e-300), 1e-6, 1e-3);
  return std::min(step, 1e-3 * gap);
}

}  // namespace

ConsistencyReport check_radial_consistency(const RadialCutoffPair& pair, int grid_points) {
  if (grid_points < 100) throw ArgumentError("grid_points must be at least 100");
  const double log_b = std::log(pair.b());
  const double log_bp = std::log(pair.b_prime());
  const double log_lo = log_b - std::numbers::ln2;
  const double log_hi = std::min(pair.log_b_tilde() + std::numbers::ln2, 700.0);
  ConsistencyReport rep;
  for (int k = 0; k < grid_points; ++k) {
    const double s = log_lo + (log_hi - log_lo) * k / (grid_points - 1);
    const double r = std::exp(s);
    const auto v = pair.evaluate(r);
    ++rep.points;
    rep.max_unity_error = std::max(rep.max_unity_error, std::abs(v.chi1 * v.chi1 + v.chi2 * v.chi2 - 1.0));
    const double grad = std::hypot(v.dchi1, v.dchi2);
    const double gap = joint_gap(s, {log_b, log_bp, pair.log_b_tilde()});
    if (grad == 0.0 || gap < 1e-2) continue;
    const double h = difference_step(r * grad, gap) * r;
    const auto up = pair.evaluate(r + h);
    const auto dn = pair.evaluate(r - h);
    const double e1 = (up.chi1 - dn.chi1) / (2 * h) - v.dchi1;
    const double e2 = (up.chi2 - dn.chi2) / (2 * h) - v.dchi2;
    ++rep.derivative_points;
    rep.max_derivative_error = std::max(rep.max_derivative_error, std::hypot(e1, e2) / grad);
  }
  return rep;
}

ConsistencyReport check_cone_consistency(const ConeCutoffPair& pair, long samples, std::uint64_t seed) {
  if (samples < 1) throw ArgumentError("need at least one sample");
  const auto& sys = pair.system();
  const double log_k2 = std::log(pair.kappa_second());
  const double log_k = std::log(pair.kappa());
  // Differences resolve q(Z) only well above the roundoff floor of the projection.
  const double log_floor = std::log(kRepresentableRatio);
  const double log_diff = std::log(1e-5);
  const double log_lo = std::max(pair.log_kappa_prime(), log_diff);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ConsistencyReport rep;
  for (long k = 0; k < samples; ++k) {
    // Thirds: tiny ratios (identity only), the log part, the smoothstep part and beyond up to 2 kappa.
    double s = 0.0;
    switch (k % 3) {
      case 0: s = log_floor + (log_diff - log_floor) * unif(rng); break;
      case 1: s = log_lo + (log_k2 - log_lo) * unif(rng); break;
      default: s = std::log(pair.kappa_second() + (2.0 * pair.kappa() - pair.kappa_second()) * unif(rng)); break;
    }
    const auto x = geometry::ratio_point(sys, pair.partition(), std::exp(s), rng);
    const auto cv = pair.evaluate(x);
    ++rep.points;
    rep.max_unity_error = std::max(rep.max_unity_error, std::abs(cv.u * cv.u + cv.v * cv.v - 1.0));
    const double grad =
        std::sqrt(geometry::mass_inner(sys, cv.grad_u, cv.grad_u) + geometry::mass_inner(sys, cv.grad_v, cv.grad_v));
    const double gap = joint_gap(s, {pair.log_kappa_prime(), log_k2, log_k});
    if (s < log_diff || grad == 0.0 || gap < 1e-2) continue;
    auto dir = geometry::gaussian_relative(sys, rng);
    dir *= 1.0 / geometry::mass_norm(sys, dir);
    const auto n = geometry::split_norms(sys, pair.partition(), x);
    const double h = difference_step(pair.profile(s).dpsi_ds, gap) * std::sqrt(std::min(n.q_sq, n.xi_sq));
    const auto up = pair.evaluate(x + h * dir);
    const auto dn = pair.evaluate(x - h * dir);
    const double eu = (up.u - dn.u) / (2 * h) - geometry::mass_inner(sys, cv.grad_u, dir);
    const double ev = (up.v - dn.v) / (2 * h) - geometry::mass_inner(sys, cv.grad_v, dir);
    ++rep.derivative_points;
    rep.max_derivative_error = std::max(rep.max_derivative_error, std::hypot(eu, ev) / grad);
  }
  return rep;
}

}  // namespace vlab::cutoffs
