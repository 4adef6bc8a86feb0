#include "vlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "vlab/errors.hpp"

namespace vlab::spectral {

std::optional<TailExponents> tail_exponents(const PotentialSpec& shape, int d, int l, double epsilon) {
  if (d < 3) throw ArgumentError("tail exponents need d >= 3");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ArgumentError("epsilon must lie in [0, 1)");
  const double centrifugal = l * (l + d - 2.0);
  if (!shape.has_tail() || shape.beta1 == 0.0) return TailExponents{l + d - 2.0, -static_cast<double>(l)};
  if (shape.beta2 < 2.0) return std::nullopt;
  // s (s - (d - 2)) = l (l + d - 2) + beta1 / (1 - eps)
  const double half = 0.5 * (d - 2.0);
  const double root = std::sqrt(half * half + centrifugal + shape.beta1 / (1.0 - epsilon));
  return TailExponents{half + root, half - root};
}

namespace {

struct State {
  double psi = 1.0;
  double p = 0.0;  // r psi'
  double log_scale = 0.0;
  int renormalisations = 0;
};

// Outward integration of psi_t = p, p_t = -(d - 2) p + (l (l + d - 2) + r^2 V / (1 - eps)) psi in t = ln r.
class Shooter {
 public:
  Shooter(const PotentialSpec& shape, int d, int l, double epsilon)
      : v_(shape), d_(d), centrifugal_(l * (l + d - 2.0)), kin_(1.0 - epsilon) {
    if (d < 3) throw ArgumentError("zero-energy integration needs d >= 3");
    if (l < 0) throw ArgumentError("angular sector must be non-negative");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ArgumentError("epsilon must lie in [0, 1)");
    v_.validate();
    if (auto bp = v_.breakpoint()) log_break_ = std::log(*bp);
    log_start_ = std::log(1e-6 * v_.scale());
    state_.p = l;
  }

  double log_start() const { return log_start_; }
  double log_position() const { return t_; }
  const State& state() const { return state_; }

  void start_at(double log_r) {
    log_start_ = std::min(log_start_, log_r);
    t_ = log_start_;
  }

  // Integrates up to log_r, splitting at the potential's jump.
  void advance_to(double log_r) {
    if (log_break_ && t_ < *log_break_ && log_r > *log_break_) {
      segment(*log_break_);
      segment(log_r);
    } else {
      segment(log_r);
    }
  }

 private:
  // V on the current piece; the branch of a jump follows the probe point.
  double w(double r, double probe) const {
    double v = 0.0;
    if (v_.shape == Shape::gaussian) {
      v = v_(r);
    } else {
      v = v_.coupling * v_.core(probe);
      if (v_.has_tail() && probe >= v_.inner_radius) v += v_.beta1 * std::pow(r, -v_.beta2);
    }
    return v / kin_;
  }

  // Chunks of at most 0.05 in t keep the step bound local.
  void segment(double t_end) {
    while (t_end - t_ > 0.05) piece(t_ + 0.05);
    piece(t_end);
  }

  void piece(double t_end) {
    const double span = t_end - t_;
    if (!(span > 0.0)) return;
    const double probe = std::exp(0.5 * (t_ + t_end));
    const double ra = std::exp(t_);
    const double rb = std::exp(t_end);
    const double wmax = std::max(std::abs(w(ra, probe)), std::abs(w(rb, probe)));
    double hmax = 1e-3;
    if (wmax > 0.0) hmax = std::min(hmax, 0.05 / (rb * std::sqrt(wmax)));
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / hmax)));
    const double h = span / static_cast<double>(steps);
    const double t0 = t_;
    for (long k = 0; k < steps; ++k) {
      rk4(t0 + k * h, h, probe);
      renormalise();
    }
    t_ = t_end;
  }

  void rk4(double t, double h, double probe) {
    auto rhs = [&](double tt, double psi, double p, double& dpsi, double& dp) {
      const double r = std::exp(tt);
      dpsi = p;
      dp = -(d_ - 2.0) * p + (centrifugal_ + r * r * w(r, probe)) * psi;
    };
    double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    const double y = state_.psi, p = state_.p;
    rhs(t, y, p, k1a, k1b);
    rhs(t + 0.5 * h, y + 0.5 * h * k1a, p + 0.5 * h * k1b, k2a, k2b);
    rhs(t + 0.5 * h, y + 0.5 * h * k2a, p + 0.5 * h * k2b, k3a, k3b);
    rhs(t + h, y + h * k3a, p + h * k3b, k4a, k4b);
    state_.psi = y + h / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a);
    state_.p = p + h / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b);
  }

  void renormalise() {
    const double m = std::max(std::abs(state_.psi), std::abs(state_.p));
    if (m > 1e100 || (m < 1e-100 && m > 0.0)) {
      state_.psi /= m;
      state_.p /= m;
      state_.log_scale += std::log(m);
      ++state_.renormalisations;
    }
  }

  PotentialSpec v_;
  int d_;
  double centrifugal_;
  double kin_;
  std::optional<double> log_break_;
  double log_start_ = 0.0;
  double t_ = 0.0;
  State state_;
};

// Sign of the growing tail amplitude at log_r, or of psi when the tail has no power-law pair.
int growing_sign(const PotentialSpec& shape, int d, int l, double lambda, double log_r) {
  const auto pair = tail_exponents(shape, d, l);
  Shooter sh(shape.with_coupling(lambda), d, l, 0.0);
  sh.start_at(sh.log_start());
  sh.advance_to(log_r);
  const auto& s = sh.state();
  const double g = pair ? pair->decaying * s.psi + s.p : s.psi;
  return g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
}

}  // namespace

ZeroEnergySolution zero_energy_solution(const PotentialSpec& shape, int d, double lambda,
                                        std::pair<double, double> r_span, int l, double epsilon,
                                        int samples_per_decade) {
  auto [r_lo, r_hi] = r_span;
  if (!(r_lo > 0.0 && r_hi > r_lo)) throw ArgumentError("r_span must satisfy 0 < r_lo < r_hi");
  if (samples_per_decade < 2) throw ArgumentError("need at least 2 samples per decade");
  const PotentialSpec v = shape.with_coupling(lambda);
  Shooter sh(v, d, l, epsilon);
  sh.start_at(std::log(r_lo));

  ZeroEnergySolution sol;
  sol.d = d;
  sol.l = l;
  const double t_lo = std::log(r_lo);
  const double t_hi = std::log(r_hi);
  const double dt = std::numbers::ln10 / samples_per_decade;
  std::vector<double> ts;
  for (long k = 0; t_lo + k * dt < t_hi - 1e-12; ++k) ts.push_back(t_lo + k * dt);
  ts.push_back(t_hi);
  for (double t : ts) {
    sh.advance_to(t);
    const auto& st = sh.state();
    sol.r.push_back(std::exp(t));
    sol.sign.push_back(st.psi > 0.0 ? 1 : (st.psi < 0.0 ? -1 : 0));
    sol.log_abs_psi.push_back(st.psi == 0.0 ? -std::numeric_limits<double>::infinity()
                                            : std::log(std::abs(st.psi)) + st.log_scale);
  }
  sol.renormalisations = sh.state().renormalisations;

  double top = -std::numeric_limits<double>::infinity();
  for (double x : sol.log_abs_psi) top = std::max(top, x);
  const double half = 0.5 * (d - 1.0);
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    const double psi = sol.sign[i] * std::exp(sol.log_abs_psi[i] - top);
    sol.psi.push_back(psi);
    sol.u.push_back(psi * std::pow(sol.r[i], half));
  }

  if (const auto pair = tail_exponents(v, d, l, epsilon)) {
    const auto& st = sh.state();
    sol.growth_fraction = (pair->decaying * st.psi + st.p) / ((pair->decaying - pair->growing) * st.psi);
    sol.growth_flag = !(std::abs(sol.growth_fraction) <= 1e-3);
  } else {
    sol.growth_fraction = std::numeric_limits<double>::quiet_NaN();
  }
  return sol;
}

ShootingCoupling refine_critical_coupling(const PotentialSpec& shape, int d, double guess, double r_match, int l) {
  if (!(guess > 0.0)) throw ArgumentError("coupling guess must be positive");
  if (!(r_match > shape.scale())) throw ArgumentError("matching radius must lie beyond the core");
  const double log_match = std::log(r_match);
  auto sign_at = [&](double lambda) { return growing_sign(shape, d, l, lambda, log_match); };

  double delta = 0.02;
  double lo = guess * (1.0 - delta), hi = guess * (1.0 + delta);
  int s_lo = sign_at(lo), s_hi = sign_at(hi);
  int expansions = 0;
  while (s_lo == s_hi) {
    if (++expansions > 8) {
      std::ostringstream os;
      os << "no sign change of the growing amplitude in [" << lo << ", " << hi << "]";
      throw BracketingError(os.str());
    }
    delta *= 2.0;
    lo = guess * std::max(0.0, 1.0 - delta);
    hi = guess * (1.0 + delta);
    s_lo = sign_at(lo);
    s_hi = sign_at(hi);
  }
  ShootingCoupling out;
  out.r_match = r_match;
  for (; out.iterations < 200; ++out.iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int s = sign_at(mid);
    if (s == 0) {
      lo = hi = mid;
      break;
    }
    if (s == s_lo)
      lo = mid;
    else
      hi = mid;
  }
  out.lambda_star = 0.5 * (lo + hi);
  out.bracket = {lo, hi};
  return out;
}

DecayFit fit_decay_exponent(const ZeroEnergySolution& sol, double r_lo, double r_hi, double marginal_tol,
                            double residual_threshold) {
  if (!(r_lo > 0.0 && r_hi > r_lo)) throw ArgumentError("fit window must satisfy 0 < r_lo < r_hi");
  std::vector<double> x, y;
  int sign = 0;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    if (sol.r[i] < r_lo || sol.r[i] > r_hi) continue;
    if (sol.sign[i] == 0 || (sign != 0 && sol.sign[i] != sign)) {
      std::ostringstream os;
      os << "psi changes sign or vanishes near r = " << sol.r[i] << " inside the fit window";
      throw FitError(os.str());
    }
    sign = sol.sign[i];
    x.push_back(std::log(sol.r[i]));
    y.push_back(sol.log_abs_psi[i]);
  }
  const auto n = x.size();
  if (n < 3) throw FitError("fit window holds fewer than 3 samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0, worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = y[i] - (my + slope * (x[i] - mx));
    ssr += res * res;
    worst = std::max(worst, std::abs(res));
  }
  DecayFit fit;
  fit.s = -slope;
  fit.stderr_s = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  fit.max_residual = worst;
  fit.points = static_cast<int>(n);
  fit.short_window = x.back() - x.front() < std::numbers::ln10;
  fit.rejected = worst > residual_threshold;
  fit.classification = hardy::eigenvalue_or_resonance(sol.d, fit.s, marginal_tol);
  return fit;
}

}  // namespace vlab::spectral
