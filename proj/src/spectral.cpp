#include "vlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vlab/errors.hpp"

namespace vlab::spectral {

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::square_well: return "square_well";
    case Shape::gaussian: return "gaussian";
    case Shape::inverse_square_tail: return "inverse_square_tail";
    case Shape::inverse_power_tail: return "inverse_power_tail";
  }
  return "unknown";
}

Shape parse_shape(std::string_view name) {
  for (auto s : {Shape::square_well, Shape::gaussian, Shape::inverse_square_tail, Shape::inverse_power_tail})
    if (to_string(s) == name) return s;
  throw ArgumentError("unknown potential shape '" + std::string(name) + "'");
}

PotentialSpec PotentialSpec::square_well(double depth, double radius) {
  PotentialSpec p;
  p.shape = Shape::square_well;
  p.depth = depth;
  p.radius = radius;
  p.validate();
  return p;
}

PotentialSpec PotentialSpec::gaussian(double depth, double width) {
  PotentialSpec p;
  p.shape = Shape::gaussian;
  p.depth = depth;
  p.width = width;
  p.validate();
  return p;
}

PotentialSpec PotentialSpec::inverse_square_tail(double beta1, double inner_radius) {
  PotentialSpec p;
  p.shape = Shape::inverse_square_tail;
  p.beta1 = beta1;
  p.beta2 = 2.0;
  p.inner_radius = inner_radius;
  p.validate();
  return p;
}

PotentialSpec PotentialSpec::inverse_power_tail(double beta1, double beta2, double inner_radius) {
  PotentialSpec p;
  p.shape = Shape::inverse_power_tail;
  p.beta1 = beta1;
  p.beta2 = beta2;
  p.inner_radius = inner_radius;
  p.validate();
  return p;
}

void PotentialSpec::validate() const {
  switch (shape) {
    case Shape::square_well:
      if (!(depth > 0.0) || !(radius > 0.0)) throw ArgumentError("square well needs depth, radius > 0");
      break;
    case Shape::gaussian:
      if (!(depth > 0.0) || !(width > 0.0)) throw ArgumentError("gaussian needs depth, width > 0");
      break;
    case Shape::inverse_square_tail:
      if (beta2 != 2.0) throw ArgumentError("inverse_square_tail has beta2 = 2");
      [[fallthrough]];
    case Shape::inverse_power_tail:
      if (!(inner_radius > 0.0)) throw ArgumentError("tail needs inner_radius > 0");
      if (!(beta1 >= 0.0)) throw ArgumentError("tail needs beta1 >= 0");
      if (!(beta2 > 0.0 && beta2 <= 2.0)) throw ArgumentError("tail exponent beta2 must lie in (0, 2]");
      break;
  }
  if (!std::isfinite(coupling)) throw ArgumentError("coupling must be finite");
}

PotentialSpec PotentialSpec::with_coupling(double lambda) const {
  PotentialSpec p = *this;
  p.coupling = lambda;
  return p;
}

double PotentialSpec::core(double r) const {
  switch (shape) {
    case Shape::square_well: return r < radius ? -depth : 0.0;
    case Shape::gaussian: return -depth * std::exp(-(r * r) / (width * width));
    default: return r < inner_radius ? -1.0 : 0.0;
  }
}

double PotentialSpec::tail(double r) const {
  if (!has_tail() || r < inner_radius) return 0.0;
  return beta1 * std::pow(r, -beta2);
}

double PotentialSpec::scale() const {
  switch (shape) {
    case Shape::square_well: return radius;
    case Shape::gaussian: return width;
    default: return inner_radius;
  }
}

std::optional<double> PotentialSpec::breakpoint() const {
  switch (shape) {
    case Shape::square_well: return radius;
    case Shape::gaussian: return std::nullopt;
    default: return inner_radius;
  }
}

double PotentialSpec::cell_average(double a, double b) const {
  if (!(b > a)) return (*this)(a);
  const double len = b - a;
  double core_integral = 0.0;
  if (shape == Shape::gaussian) {
    core_integral = -depth * 0.5 * std::sqrt(std::numbers::pi) * width * (std::erf(b / width) - std::erf(a / width));
  } else {
    const double edge = shape == Shape::square_well ? radius : inner_radius;
    const double height = shape == Shape::square_well ? depth : 1.0;
    core_integral = -height * std::max(0.0, std::min(b, edge) - std::max(a, 0.0));
  }
  double tail_integral = 0.0;
  if (has_tail() && b > inner_radius && beta1 != 0.0) {
    const double lo = std::max(a, inner_radius);
    if (beta2 == 1.0)
      tail_integral = beta1 * std::log(b / lo);
    else
      tail_integral = beta1 * (std::pow(b, 1.0 - beta2) - std::pow(lo, 1.0 - beta2)) / (1.0 - beta2);
  }
  return (coupling * core_integral + tail_integral) / len;
}

void RadialProblem::validate() const {
  if (d < 3) throw ArgumentError("radial problems need d >= 3");
  if (l < 0) throw ArgumentError("angular sector must be non-negative");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ArgumentError("epsilon must lie in [0, 1)");
  if (!(grid.r_max > 0.0)) throw ArgumentError("r_max must be positive");
  if (grid.points < 100) throw ArgumentError("grid needs at least 100 points");
  potential.validate();
}

linalg::SymTridiagonal discretize(const RadialProblem& problem) {
  problem.validate();
  const double h = problem.grid.r_max / problem.grid.points;
  const double across = problem.potential.scale() / h;
  if (across < 10.0) {
    std::ostringstream os;
    os << "grid spacing " << h << " resolves the core of size " << problem.potential.scale() << " with only "
       << across << " points (need 10)";
    throw ResolutionError(os.str());
  }
  const double kin = 1.0 - problem.epsilon;
  const int d = problem.d;
  const int l = problem.l;
  const double centrifugal = (d - 1.0) * (d - 3.0) / 4.0 + l * (l + d - 2.0);
  const int n = problem.grid.points - 1;
  linalg::SymTridiagonal t;
  t.diag.resize(static_cast<std::size_t>(n));
  t.off.assign(static_cast<std::size_t>(n - 1), -kin / (h * h));
  for (int i = 0; i < n; ++i) {
    const double r = (i + 1) * h;
    t.diag[i] = kin * (2.0 / (h * h) + centrifugal / (r * r)) + problem.potential.cell_average(r - 0.5 * h, r + 0.5 * h);
  }
  return t;
}

SpectralReport analyze(const RadialProblem& problem, int max_eigenvalues, double tol_edge) {
  const auto t = discretize(problem);
  SpectralReport rep;
  rep.epsilon = problem.epsilon;
  rep.lambda = problem.potential.coupling;
  rep.grid = problem.grid;
  rep.tol_edge = tol_edge;
  rep.negative_count = linalg::sturm_count(t, -tol_edge);
  rep.ground_energy = linalg::kth_eigenvalue(t, 0);
  const long below_zero = linalg::sturm_count(t, 0.0);
  const long k = std::min<long>(below_zero, max_eigenvalues);
  rep.eigenvalues = linalg::lowest_eigenvalues(t, static_cast<std::size_t>(k));
  return rep;
}

CriticalCoupling critical_coupling(const PotentialSpec& shape, int d, const Grid& grid, int l) {
  RadialProblem problem{d, shape, 0.0, grid, l};
  auto count_at = [&](double lambda) {
    problem.potential = shape.with_coupling(lambda);
    return linalg::sturm_count(discretize(problem), 0.0);
  };
  double lo = 0.0;
  if (count_at(lo) != 0) throw BracketingError("operator already has negative spectrum at zero coupling");
  double hi = 1.0;
  int doublings = 0;
  while (count_at(hi) == 0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) throw BracketingError("no bound state for couplings up to 2^60");
  }
  while (hi - lo > 1e-14 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (count_at(mid) == 0 ? lo : hi) = mid;
  }
  CriticalCoupling out;
  out.lambda_star = hi;
  out.bracket = {lo, hi};
  problem.potential = shape.with_coupling(hi);
  out.ground_energy = linalg::kth_eigenvalue(discretize(problem), 0);
  problem.epsilon = out.witness_epsilon;
  out.witness_energy = linalg::kth_eigenvalue(discretize(problem), 0);
  return out;
}

std::vector<SpectralReport> epsilon_sweep(const RadialProblem& family, double lambda,
                                          const std::vector<double>& eps_list) {
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] >= 0.0 && eps_list[k] < 1.0)) throw ArgumentError("epsilon values must lie in [0, 1)");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1])) throw ArgumentError("epsilon list must be strictly descending");
  }
  std::vector<SpectralReport> out;
  out.reserve(eps_list.size());
  for (double eps : eps_list) {
    RadialProblem p = family;
    p.epsilon = eps;
    p.potential = family.potential.with_coupling(lambda);
    out.push_back(analyze(p));
  }
  return out;
}

}  // namespace vlab::spectral
