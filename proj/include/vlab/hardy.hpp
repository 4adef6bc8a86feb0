#pragma once

// Hardy constants, decay-exponent bounds and the L^2 classification of
// zero-energy solutions psi ~ r^-s.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vlab::hardy {

/// (d - 2)^2 / 4, the sharp constant in ||grad f||^2 >= c || f / |x| ||^2 on R^d.
/// Throws DomainError for d < 3.
double hardy_constant(int d);

/// L(L + 1) with L = l + (dim_x0 - 3) / 2.
double angular_hardy(int l, int dim_x0);

enum class DecayMode {
  one_body_short_range,
  one_body_long_range_critical,
  one_body_long_range_subcritical,
  n_body,
};

std::string_view to_string(DecayMode mode);
/// Throws ArgumentError on an unknown name.
DecayMode parse_decay_mode(std::string_view name);

struct DecayQuery {
  DecayMode mode = DecayMode::one_body_short_range;
  int d = 3;          // one-body dimension
  int n = 3;          // n-body: spatial dimension
  int particles = 3;  // n-body: N
  double beta1 = 0.0;
  double beta2 = 2.0;
  /// Optional subexponential tail exponent in (0, 2); 0 means absent.
  double beta = 0.0;
};

struct DecayBound {
  std::optional<double> alpha_sup;  // supremum of admissible polynomial weights
  std::optional<double> kappa;      // subexponential weight exponent 1 - beta/2
};

DecayBound decay_bound(const DecayQuery& q);

enum class Classification { eigenvalue, resonance, marginal };

std::string_view to_string(Classification c);

/// EIGENVALUE if 2s > d, RESONANCE if 2s < d, MARGINAL when |s - d/2| <= marginal_tol.
Classification eigenvalue_or_resonance(int d, double s, double marginal_tol = 1e-9);

/// Largest alpha with (1 + |x|)^(alpha - 1) r^-s in L^2 at infinity: s + 1 - d/2.
double weighted_l2_threshold(int d, double s);

// ---------------------------------------------------------------------------
// Three identical fermions on a line: after removing the centre of mass the
// antisymmetric sector is spanned by a_n(rho) sin(3 n theta).

enum class RadialBoundary { free, dirichlet };

struct RadialGrid {
  double rho0 = 1.0;
  double rho1 = 1e4;
  int points = 2000;  // geometric nodes on [rho0, rho1]
  RadialBoundary boundary = RadialBoundary::free;
};

struct FermionHardyResult {
  double min_rayleigh = 0.0;
  int minimizing_mode = 0;             // n of the minimising sin(3 n theta) mode
  std::vector<double> mode_minimum;    // entry n - 1 is the minimum within mode n
  /// Minimum of the block-diagonal operator over all modes at once (must
  /// coincide with the smallest mode minimum).
  double joint_minimum = 0.0;
};

/// Minimises ||grad psi||^2 / ||psi / rho||^2 over psi = sum_{n <= modes} a_n(rho) sin(3 n theta)
/// with linear finite elements in rho on a geometric grid.
FermionHardyResult fermion1d_constant_check(const RadialGrid& grid, int angular_modes);

}  // namespace vlab::hardy
