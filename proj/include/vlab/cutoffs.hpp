#pragma once

// IMS partitions of unity chi1^2 + chi2^2 = 1 with pointwise gradient control.
//
// Both pairs are written as (cos psi, sin psi) for an angle psi that climbs
// from 0 to pi/2, so the localisation error |grad chi1|^2 + |grad chi2|^2 is
// simply |grad psi|^2.
//
// Radii and apertures that can be astronomically large or small are stored
// through their logarithms.

#include <cstdint>
#include <random>

#include "vlab/geometry.hpp"

namespace vlab::cutoffs {

/// C^1 smoothstep 3 tau^2 - 2 tau^3 on [0, 1] and its derivative.
double smoothstep(double tau);
double smoothstep_slope(double tau);

struct RadialValue {
  double chi1 = 1.0;
  double chi2 = 0.0;
  double dchi1 = 0.0;  // d/dr
  double dchi2 = 0.0;
};

/// Radial pair: chi1 = 1 on [0, b], a smoothstep turn of the angle on [b, b'],
/// chi1 linear in log r on [b', b~], chi1 = 0 beyond b~.
class RadialCutoffPair {
 public:
  RadialCutoffPair(double epsilon, double b, double b_prime, double log_b_tilde, double theta1, int d);

  double epsilon() const noexcept { return epsilon_; }
  double b() const noexcept { return b_; }
  double b_prime() const noexcept { return b_prime_; }
  double log_b_tilde() const noexcept { return log_b_tilde_; }
  /// exp(log_b_tilde); infinite when it overflows.
  double b_tilde() const;
  /// chi1(b') = cos(theta1).
  double theta1() const noexcept { return theta1_; }
  int dimension() const noexcept { return d_; }

  RadialValue evaluate(double r) const;
  /// r^2 (chi1'^2 + chi2'^2) as a function of log r.
  double scaled_gradient_sq(double log_r) const;
  /// r^2 (chi1'^2 + chi2'^2) / epsilon; the certified bound is <= 1.
  double bound_ratio(double log_r) const { return scaled_gradient_sq(log_r) / epsilon_; }
  /// Left-hand side of the sizing condition for b~:
  /// u(b')^2 / (1 - u(b')^2) / ln(b'/b~)^2, to be compared with epsilon.
  double outer_condition() const;

  /// Same profile with a different outer radius (negative controls).
  RadialCutoffPair with_log_b_tilde(double log_b_tilde) const;

 private:
  double epsilon_;
  double b_;
  double b_prime_;
  double log_b_tilde_;
  double theta1_;
  int d_;
};

RadialCutoffPair build_radial_cutoff(double epsilon, double b, int d);

struct RadialBoundReport {
  double max_ratio = 0.0;
  double argmax_radius = 0.0;
  double argmax_log_radius = 0.0;
};

/// Geometric grid on [b(1 - 1e-6), b~(1 + 1e-6)].
RadialBoundReport verify_radial_bound(const RadialCutoffPair& pair, int grid_points);
/// Geometric grid on [exp(log_lo), exp(log_hi)].
RadialBoundReport verify_radial_bound(const RadialCutoffPair& pair, int grid_points, double log_lo,
                                      double log_hi);

struct LocalizationIntegral {
  double lhs = 0.0;  // integral of (|grad chi1|^2 + |grad chi2|^2) psi^2
  double rhs = 0.0;  // epsilon / hardy_constant(d) * ||grad psi||^2
};

/// Localisation error of the radial pair against psi = exp(-r^2 / (2 w^2)),
/// by quadrature in log r. Requires d = 3.
LocalizationIntegral gaussian_localization_error(const RadialCutoffPair& pair, double width);

// ---------------------------------------------------------------------------

struct ConeValue {
  double t = 0.0;
  double u = 1.0;
  double v = 0.0;
  geometry::Configuration grad_u;  // mass-metric gradients, tangent to X0
  geometry::Configuration grad_v;
};

/// Cone pair in the ratio t = |q(Z)|_m / |xi(Z)|_m: u = 1 for t <= kappa',
/// v linear in log t on [kappa', kappa''], smoothstep turn on [kappa'', kappa],
/// u = 0 for t >= kappa.
class ConeCutoffPair {
 public:
  ConeCutoffPair(geometry::MassSystem sys, geometry::Partition z, double epsilon, double kappa,
                 double kappa_second, double log_kappa_prime, double phi_span);

  const geometry::MassSystem& system() const noexcept { return sys_; }
  const geometry::Partition& partition() const noexcept { return z_; }
  double epsilon() const noexcept { return epsilon_; }
  double kappa() const noexcept { return kappa_; }
  double kappa_second() const noexcept { return kappa_second_; }
  double log_kappa_prime() const noexcept { return log_kappa_prime_; }
  /// exp(log_kappa_prime); zero when it underflows.
  double kappa_prime() const;
  /// Angle swept by the smoothstep part.
  double phi_span() const noexcept { return phi_span_; }
  /// v(kappa'') = cos(phi_span).
  double v_second() const;

  /// Angle psi (u = cos psi, v = sin psi) and d psi / d ln t at ratio exp(s).
  struct Profile {
    double psi = 0.0;
    double dpsi_ds = 0.0;
  };
  Profile profile(double log_t) const;

  /// (|grad u|^2 + |grad v|^2) / (epsilon [v^2 |x|^-2 + u^2 |q|^-2]) as a
  /// function of log t alone (both sides scale as |xi|^-2).
  double defect(double log_t) const;

  ConeValue evaluate(const geometry::Configuration& x) const;

  /// v(kappa'')^2 (1 + kappa''^2) / ((1 - v(kappa'')^2)^2 ln(kappa''/kappa')^2),
  /// a sufficient condition for the log part; compare with epsilon.
  double log_part_condition() const;

  ConeCutoffPair with_log_kappa_prime(double log_kappa_prime) const;

 private:
  geometry::MassSystem sys_;
  geometry::Partition z_;
  double epsilon_;
  double kappa_;
  double kappa_second_;
  double log_kappa_prime_;
  double phi_span_;
};

ConeCutoffPair build_cone_cutoff(const geometry::MassSystem& sys, const geometry::Partition& z,
                                 double epsilon, double kappa);

struct ConeBoundReport {
  long samples = 0;
  /// Samples evaluated on actual configurations (the rest, at ratios too small
  /// to represent, use the closed-form defect in log t).
  long configurations = 0;
  double max_defect = 0.0;
  double argmax_log_t = 0.0;
};

/// Half the ratios log-uniform on [kappa', kappa''], half uniform on
/// [kappa'', kappa], plus the three breakpoints.
ConeBoundReport verify_cone_bound(const ConeCutoffPair& pair, long samples, std::uint64_t seed);

// ---------------------------------------------------------------------------

struct ConsistencyReport {
  long points = 0;
  double max_unity_error = 0.0;       // max |a^2 + b^2 - 1|
  long derivative_points = 0;         // points away from the joints
  double max_derivative_error = 0.0;  // centred differences vs analytic, relative to |grad psi|
};

/// Partition of unity on a geometric grid covering [b/2, 2 b~] (capped at
/// e^700) and centred-difference derivatives away from b, b', b~.
ConsistencyReport check_radial_consistency(const RadialCutoffPair& pair, int grid_points);

/// Same checks for the cone pair on seeded configurations; directional
/// differences along random relative directions.
ConsistencyReport check_cone_consistency(const ConeCutoffPair& pair, long samples, std::uint64_t seed);

}  // namespace vlab::cutoffs
