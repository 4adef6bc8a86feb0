#include "vlab/hardy.hpp"

#include <cmath>
#include <string>

#include "vlab/errors.hpp"
#include "vlab/tridiagonal.hpp"

namespace vlab::hardy {

double hardy_constant(int d) {
  if (d < 3) throw DomainError("the Hardy inequality needs d >= 3, got d = " + std::to_string(d));
  const double a = d - 2.0;
  return a * a / 4.0;
}

double angular_hardy(int l, int dim_x0) {
  if (l < 0 || dim_x0 < 2) throw ArgumentError("angular_hardy needs l >= 0 and dim X0 >= 2");
  const double big_l = l + 0.5 * (dim_x0 - 3);
  return big_l * (big_l + 1.0);
}

std::string_view to_string(DecayMode mode) {
  switch (mode) {
    case DecayMode::one_body_short_range: return "one_body_short_range";
    case DecayMode::one_body_long_range_critical: return "one_body_long_range_critical";
    case DecayMode::one_body_long_range_subcritical: return "one_body_long_range_subcritical";
    case DecayMode::n_body: return "n_body";
  }
  return "unknown";
}

DecayMode parse_decay_mode(std::string_view name) {
  for (auto m : {DecayMode::one_body_short_range, DecayMode::one_body_long_range_critical,
                 DecayMode::one_body_long_range_subcritical, DecayMode::n_body})
    if (to_string(m) == name) return m;
  throw ArgumentError("unknown decay mode '" + std::string(name) + "'");
}

DecayBound decay_bound(const DecayQuery& q) {
  DecayBound out;
  if (q.beta != 0.0 && !(q.beta > 0.0 && q.beta < 2.0)) throw ArgumentError("beta must lie in (0, 2)");
  switch (q.mode) {
    case DecayMode::one_body_short_range:
      if (q.d < 3) throw ArgumentError("one-body modes need d >= 3");
      out.alpha_sup = (q.d - 2.0) / 2.0;
      break;
    case DecayMode::one_body_long_range_critical:
      if (q.d < 3) throw ArgumentError("one-body modes need d >= 3");
      if (q.beta2 != 2.0) throw ArgumentError("the critical long-range mode needs beta2 = 2");
      if (!(q.beta1 > 0.0)) throw ArgumentError("beta1 must be positive");
      out.alpha_sup = std::sqrt(q.beta1 + hardy_constant(q.d));
      break;
    case DecayMode::one_body_long_range_subcritical:
      if (q.d < 3) throw ArgumentError("one-body modes need d >= 3");
      if (!(q.beta2 > 0.0 && q.beta2 < 2.0)) throw ArgumentError("the subcritical mode needs beta2 in (0, 2)");
      if (!(q.beta1 > 0.0)) throw ArgumentError("beta1 must be positive");
      out.kappa = 1.0 - q.beta2 / 2.0;
      break;
    case DecayMode::n_body:
      if (q.n < 3 || q.particles < 3) throw ArgumentError("the n-body mode needs n >= 3 and N >= 3");
      out.alpha_sup = (q.n * (q.particles - 1) - 2.0) / 2.0;
      break;
  }
  if (q.beta > 0.0 && q.mode != DecayMode::one_body_long_range_subcritical) out.kappa = 1.0 - q.beta / 2.0;
  return out;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::eigenvalue: return "EIGENVALUE";
    case Classification::resonance: return "RESONANCE";
    case Classification::marginal: return "MARGINAL";
  }
  return "UNKNOWN";
}

Classification eigenvalue_or_resonance(int d, double s, double marginal_tol) {
  const double gap = s - 0.5 * d;
  if (std::abs(gap) <= marginal_tol) return Classification::marginal;
  return gap > 0.0 ? Classification::eigenvalue : Classification::resonance;
}

double weighted_l2_threshold(int d, double s) { return s + 1.0 - 0.5 * d; }

FermionHardyResult fermion1d_constant_check(const RadialGrid& grid, int angular_modes) {
  if (!(grid.rho0 > 0.0) || !(grid.rho1 > grid.rho0)) throw ArgumentError("annulus needs 0 < rho0 < rho1");
  if (grid.points < 3) throw ArgumentError("radial grid needs at least 3 points");
  if (angular_modes < 1) throw ArgumentError("need at least one angular mode");

  const int p = grid.points;
  const double ratio = std::pow(grid.rho1 / grid.rho0, 1.0 / (p - 1));
  std::vector<double> rho(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) rho[k] = grid.rho0 * std::pow(ratio, k);
  rho.back() = grid.rho1;

  // Linear elements for int a'^2 rho d rho (stiffness) and int a^2 / rho d rho
  // (mass, lumped with exact integrals of the hat functions against 1/rho).
  std::vector<double> stiff_diag(p, 0.0), stiff_off(p - 1, 0.0), mass(p, 0.0);
  for (int k = 0; k + 1 < p; ++k) {
    const double h = rho[k + 1] - rho[k];
    const double s = (rho[k] + rho[k + 1]) / (2.0 * h);
    stiff_diag[k] += s;
    stiff_diag[k + 1] += s;
    stiff_off[k] = -s;
    const double log_ratio = std::log(rho[k + 1] / rho[k]);
    mass[k] += (rho[k + 1] * log_ratio - h) / h;
    mass[k + 1] += (h - rho[k] * log_ratio) / h;
  }
  const int first = grid.boundary == RadialBoundary::dirichlet ? 1 : 0;
  const int last = grid.boundary == RadialBoundary::dirichlet ? p - 2 : p - 1;
  const int m = last - first + 1;
  if (m < 1) throw ArgumentError("no interior nodes left after Dirichlet truncation");

  // M^-1/2 K M^-1/2 is tridiagonal; adding mode n shifts it by (3n)^2.
  linalg::SymTridiagonal base;
  for (int k = first; k <= last; ++k) base.diag.push_back(stiff_diag[k] / mass[k]);
  for (int k = first; k < last; ++k) base.off.push_back(stiff_off[k] / std::sqrt(mass[k] * mass[k + 1]));

  FermionHardyResult out;
  linalg::SymTridiagonal joint;
  for (int n = 1; n <= angular_modes; ++n) {
    const double shift = 9.0 * n * n;
    linalg::SymTridiagonal mode = base;
    for (double& d : mode.diag) d += shift;
    out.mode_minimum.push_back(linalg::kth_eigenvalue(mode, 0));
    if (n > 1) joint.off.push_back(0.0);
    joint.diag.insert(joint.diag.end(), mode.diag.begin(), mode.diag.end());
    joint.off.insert(joint.off.end(), mode.off.begin(), mode.off.end());
  }
  out.joint_minimum = linalg::kth_eigenvalue(joint, 0);
  out.minimizing_mode = 1;
  out.min_rayleigh = out.mode_minimum[0];
  for (int n = 2; n <= angular_modes; ++n)
    if (out.mode_minimum[n - 1] < out.min_rayleigh) {
      out.min_rayleigh = out.mode_minimum[n - 1];
      out.minimizing_mode = n;
    }
  return out;
}

}  // namespace vlab::hardy
