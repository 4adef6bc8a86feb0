#pragma once

// Radial one-particle operators h_eps = -(1 - eps) Laplacian + V on R^d,
// restricted to angular sector l:
//   * finite differences for u = r^((d-1)/2) psi on a Dirichlet box,
//   * critical couplings by Sturm counting at zero energy,
//   * zero-energy solutions by outward integration in log r,
//   * the Hardy-critical model -u'' - c u / r^2 in the log variable.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vlab/hardy.hpp"
#include "vlab/tridiagonal.hpp"

namespace vlab::spectral {

enum class Shape { square_well, gaussian, inverse_square_tail, inverse_power_tail };

std::string_view to_string(Shape s);
Shape parse_shape(std::string_view name);

/// V(r) = coupling * core(r) + tail(r).
///   square_well:        core = -depth on r < radius
///   gaussian:           core = -depth exp(-r^2 / width^2)
///   inverse_*_tail:     core = -1 on r < inner_radius,
///                       tail = beta1 r^-beta2 on r >= inner_radius (beta2 = 2 for inverse_square_tail)
struct PotentialSpec {
  Shape shape = Shape::square_well;
  double depth = 1.0;
  double radius = 1.0;
  double width = 1.0;
  double beta1 = 0.0;
  double beta2 = 2.0;
  double inner_radius = 1.0;
  double coupling = 1.0;

  static PotentialSpec square_well(double depth, double radius);
  static PotentialSpec gaussian(double depth, double width);
  static PotentialSpec inverse_square_tail(double beta1, double inner_radius);
  static PotentialSpec inverse_power_tail(double beta1, double beta2, double inner_radius);

  void validate() const;
  PotentialSpec with_coupling(double lambda) const;

  double core(double r) const;
  double tail(double r) const;
  double operator()(double r) const { return coupling * core(r) + tail(r); }
  /// Exact average of V over [a, b].
  double cell_average(double a, double b) const;
  /// Length scale of the attractive core.
  double scale() const;
  /// Radius where V has a jump, if any.
  std::optional<double> breakpoint() const;
  bool has_tail() const { return shape == Shape::inverse_square_tail || shape == Shape::inverse_power_tail; }
};

struct Grid {
  double r_max = 200.0;
  int points = 20000;
};

struct RadialProblem {
  int d = 3;
  PotentialSpec potential;
  double epsilon = 0.0;
  Grid grid;
  int l = 0;

  void validate() const;
};

/// Nodes r_i = i h, i = 1..points-1, h = r_max / points; Dirichlet at 0 and r_max.
/// Throws ResolutionError when fewer than 10 nodes fall across the core.
linalg::SymTridiagonal discretize(const RadialProblem& problem);

using linalg::lowest_eigenvalues;

struct SpectralReport {
  std::vector<double> eigenvalues;  // negative eigenvalues, ascending (at most max_eigenvalues)
  double ground_energy = 0.0;       // lowest eigenvalue, negative or not
  long negative_count = 0;          // #{E < -tol_edge}
  double epsilon = 0.0;
  double lambda = 0.0;
  Grid grid;
  double tol_edge = 0.0;
};

SpectralReport analyze(const RadialProblem& problem, int max_eigenvalues = 8, double tol_edge = 0.0);

struct CriticalCoupling {
  double lambda_star = 0.0;                  // upper end of the final bracket
  std::pair<double, double> bracket{0, 0};   // ground energy >= 0 at first, < 0 at second
  double ground_energy = 0.0;                // at lambda_star, eps = 0
  double witness_epsilon = 1e-3;
  double witness_energy = 0.0;               // at lambda_star, eps = witness_epsilon
};

/// Bisection in the coupling for the first negative eigenvalue of the box operator.
/// Throws BracketingError if no coupling up to 2^60 binds.
CriticalCoupling critical_coupling(const PotentialSpec& shape, int d, const Grid& grid, int l = 0);

struct ShootingCoupling {
  double lambda_star = 0.0;
  std::pair<double, double> bracket{0, 0};
  double r_match = 0.0;
  int iterations = 0;
};

/// Continuum critical coupling by zero-energy shooting to r_match: bisection on
/// the sign of the growing-mode amplitude, starting from a bracket around guess.
ShootingCoupling refine_critical_coupling(const PotentialSpec& shape, int d, double guess, double r_match,
                                          int l = 0);

/// Decay exponents of the two zero-energy solutions beyond the core,
/// psi ~ r^-s. Empty for tails decaying slower than r^-2.
struct TailExponents {
  double decaying = 0.0;
  double growing = 0.0;
};
std::optional<TailExponents> tail_exponents(const PotentialSpec& shape, int d, int l, double epsilon = 0.0);

struct ZeroEnergySolution {
  int d = 3;
  int l = 0;
  std::vector<double> r;
  std::vector<double> log_abs_psi;  // ln |psi|, renormalisations included
  std::vector<int> sign;            // sign of psi
  /// psi and u = r^((d-1)/2) psi scaled so that max |psi| = 1 on the samples.
  std::vector<double> psi;
  std::vector<double> u;
  /// Share of the growing tail mode in psi at the last sample, NaN when no
  /// power-law pair exists.
  double growth_fraction = 0.0;
  bool growth_flag = false;
  int renormalisations = 0;
};

/// RK4 in t = ln r on (psi, r psi') from psi ~ r^l near the origin.
ZeroEnergySolution zero_energy_solution(const PotentialSpec& shape, int d, double lambda,
                                        std::pair<double, double> r_span, int l = 0, double epsilon = 0.0,
                                        int samples_per_decade = 200);

struct DecayFit {
  double s = 0.0;
  double stderr_s = 0.0;
  double max_residual = 0.0;
  int points = 0;
  bool short_window = false;  // less than one decade
  bool rejected = false;      // residual nonlinearity above threshold
  hardy::Classification classification = hardy::Classification::resonance;
};

/// Least-squares slope of ln|psi| against ln r on [r_lo, r_hi]; s = -slope.
/// Throws FitError when psi changes sign inside the window or the window is empty.
DecayFit fit_decay_exponent(const ZeroEnergySolution& sol, double r_lo, double r_hi,
                            double marginal_tol = 0.05, double residual_threshold = 1e-2);

/// One report per epsilon (the list must be descending within [0, 1)).
std::vector<SpectralReport> epsilon_sweep(const RadialProblem& family, double lambda,
                                          const std::vector<double>& eps_list);

// ---------------------------------------------------------------------------
// -u'' - c u / r^2 on [1, R], Dirichlet. With t = ln r and u = r^(1/2) w the
// quadratic form becomes the one of -w'' + (1/4 - c) w on [0, ln R], so the
// negative counts coincide.

struct CriticalCount {
  double log_r = 0.0;
  long count = 0;
};

long critical_model_count(double c, double log_r, double step = 0.02);
std::vector<CriticalCount> count_negative_eigenvalues_critical_model_log(double c, const std::vector<double>& log_r_list,
                                                                         double step = 0.02);
std::vector<CriticalCount> count_negative_eigenvalues_critical_model(double c, const std::vector<double>& r_list,
                                                                     double step = 0.02);

/// Least-squares slope of count against ln R.
double count_slope(const std::vector<CriticalCount>& counts);

struct ThresholdBracket {
  double lo = 0.0;  // counts saturate
  double hi = 0.0;  // counts grow
  int iterations = 0;
};

/// Bisection on c with the saturation test count(T2) > count(T1).
/// Throws BracketingError unless c_lo saturates and c_hi grows.
ThresholdBracket bracket_hardy_threshold(double c_lo, double c_hi, double log_r1 = 200.0, double log_r2 = 400.0,
                                         double tol = 1e-4);

}  // namespace vlab::spectral
