#include <Eigen/Dense>
#include <cmath>
#include <algorithm>
#include <limits>
#include <span>
#include <sstream>

#include "vlab/errors.hpp"
#include "vlab/geometry.hpp"

namespace vlab::geometry {

detail::Blocks detail::blocks_of(const MassSystem& sys, const Partition& z) {
  Blocks b;
  b.order = z.order();
  b.owner.resize(static_cast<std::size_t>(sys.particles()));
  b.mass.assign(static_cast<std::size_t>(z.order()), 0.0);
  for (int i = 0; i < sys.particles(); ++i) {
    b.owner[i] = z.cluster_of(i);
    b.mass[b.owner[i]] += sys.mass(i);
  }
  for (double m : b.mass) b.inv_mass.push_back(1.0 / m);
  return b;
}

namespace {

using detail::Blocks;
using detail::blocks_of;

// Cluster centres of mass into cm (order * n entries).
void centres(const MassSystem& sys, const Blocks& b, const Configuration& x, std::vector<double>& cm) {
  const int n = sys.dim();
  const auto& m = sys.masses();
  const auto xs = x.coords();
  cm.assign(static_cast<std::size_t>(b.order * n), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double* c = cm.data() + b.owner[i] * n;
    const double* xi = xs.data() + i * static_cast<std::size_t>(n);
    for (int a = 0; a < n; ++a) c[a] += m[i] * xi[a];
  }
  for (int k = 0; k < b.order; ++k)
    for (int a = 0; a < n; ++a) cm[static_cast<std::size_t>(k * n + a)] *= b.inv_mass[static_cast<std::size_t>(k)];
}

SplitNorms split(const MassSystem& sys, const Blocks& b, const Configuration& x, std::vector<double>& cm) {
  centres(sys, b, x, cm);
  const int n = sys.dim();
  const auto& m = sys.masses();
  const auto xs = x.coords();
  SplitNorms s;
  for (int k = 0; k < b.order; ++k) {
    double c2 = 0.0;
    for (int a = 0; a < n; ++a) c2 += cm[static_cast<std::size_t>(k * n + a)] * cm[static_cast<std::size_t>(k * n + a)];
    s.xi_sq += b.mass[static_cast<std::size_t>(k)] * c2;
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double* c = cm.data() + b.owner[i] * n;
    const double* xi = xs.data() + i * static_cast<std::size_t>(n);
    double d2 = 0.0;
    for (int a = 0; a < n; ++a) d2 += (xi[a] - c[a]) * (xi[a] - c[a]);
    s.q_sq += m[i] * d2;
  }
  return s;
}

// P0(Z)x in place.
void to_internal(const MassSystem& sys, const Blocks& b, Configuration& x, std::vector<double>& cm) {
  centres(sys, b, x, cm);
  const int n = sys.dim();
  for (int i = 0; i < sys.particles(); ++i)
    for (int a = 0; a < n; ++a) x[static_cast<std::size_t>(i * n + a)] -= cm[b.owner[i] * n + a];
}

// Pc(Z)x in place.
void to_centres(const MassSystem& sys, const Blocks& b, Configuration& x, std::vector<double>& cm) {
  centres(sys, b, x, cm);
  const int n = sys.dim();
  for (int i = 0; i < sys.particles(); ++i)
    for (int a = 0; a < n; ++a) x[static_cast<std::size_t>(i * n + a)] = cm[b.owner[i] * n + a];
}

struct LowerCone {
  std::string label;
  Blocks blocks;
  double kappa_prime;
};

std::vector<LowerCone> lower_cones(const MassSystem& sys, const AzsLadder& ladder, int order) {
  std::vector<LowerCone> out;
  for (const auto& p : all_partitions(sys.particles()))
    if (p.order() < order) out.push_back({p.label(), blocks_of(sys, p), ladder.kappa_prime(p.order())});
  return out;
}

const LowerCone* absorbing_cone(const MassSystem& sys, const std::vector<LowerCone>& cones, const Configuration& x,
                                std::vector<double>& cm) {
  for (const auto& c : cones) {
    if (c.blocks.order == 1) {
      if (mass_norm(sys, x) <= c.kappa_prime) return &c;
      continue;
    }
    const auto s = split(sys, c.blocks, x, cm);
    if (s.q_sq <= c.kappa_prime * c.kappa_prime * s.xi_sq) return &c;
  }
  return nullptr;
}

double ratio(const MassSystem& sys, const Blocks& b, const Configuration& x, std::vector<double>& cm) {
  const auto s = split(sys, b, x, cm);
  if (s.xi_sq == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(s.q_sq / s.xi_sq);
}

// P0(Z) in coordinates y = sqrt(m) x, where it is an ordinary orthogonal projector.
Eigen::MatrixXd internal_projector(const MassSystem& sys, const Partition& z) {
  const int n = sys.dim();
  const int dim = static_cast<int>(sys.coordinate_count());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& c : z.clusters()) {
    double mc = 0.0;
    for (int i : c.members()) mc += sys.mass(i);
    for (int i : c.members())
      for (int k : c.members()) {
        const double v = (i == k ? 1.0 : 0.0) - std::sqrt(sys.mass(i) * sys.mass(k)) / mc;
        for (int a = 0; a < n; ++a) p(i * n + a, k * n + a) = v;
      }
  }
  return p;
}

// Orthonormal basis of the range of a projector, mapped back to x coordinates
// (so it is orthonormal for the mass inner product).
std::vector<double> range_basis(const MassSystem& sys, const Eigen::MatrixXd& projector, int rank) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(projector);
  const int dim = static_cast<int>(projector.rows());
  const int n = sys.dim();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(dim * rank));
  // Eigenvalues ascend; the last `rank` ones equal 1.
  for (int col = dim - rank; col < dim; ++col)
    for (int r = 0; r < dim; ++r) out.push_back(es.eigenvectors()(r, col) / std::sqrt(sys.mass(r / n)));
  return out;
}

// Smallest eigenvalue of P0(hat) + P0(tilde) + 2(I - P0(J)) in y coordinates.
double intersection_constant(const MassSystem& sys, const Partition& hat, const Partition& tilde,
                             const Partition& j) {
  const int dim = static_cast<int>(sys.coordinate_count());
  const Eigen::MatrixXd b = internal_projector(sys, hat) + internal_projector(sys, tilde) +
                            2.0 * (Eigen::MatrixXd::Identity(dim, dim) - internal_projector(sys, j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// x = sum_k g_k e_k / |g| for gaussian g: isotropic unit vector in span(e_k).
void unit_in_span(std::span<const double> basis, int rank, std::span<double> x,
                  std::normal_distribution<double>& normal, std::mt19937_64& rng) {
  thread_local std::vector<double> g;
  g.resize(static_cast<std::size_t>(rank));
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (int k = 0; k < rank; ++k) {
      g[static_cast<std::size_t>(k)] = normal(rng);
      norm_sq += g[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)];
    }
  } while (norm_sq == 0.0);
  const double inv = 1.0 / std::sqrt(norm_sq);
  std::fill(x.begin(), x.end(), 0.0);
  const std::size_t dim = x.size();
  for (int k = 0; k < rank; ++k) {
    const double c = g[static_cast<std::size_t>(k)] * inv;
    const double* e = basis.data() + static_cast<std::size_t>(k) * dim;
    for (std::size_t r = 0; r < dim; ++r) x[r] += c * e[r];
  }
}

struct Directions {
  Configuration q;
  Configuration xi;
};

// Unit directions in X0(Z) and Xc(Z), independent and isotropic.
void fill_gaussian(const MassSystem& sys, Configuration& g, std::normal_distribution<double>& normal,
                   std::mt19937_64& rng) {
  const int n = sys.dim();
  for (int i = 0; i < sys.particles(); ++i) {
    const double s = 1.0 / std::sqrt(sys.mass(i));
    for (int a = 0; a < n; ++a) g[static_cast<std::size_t>(i * n + a)] = s * normal(rng);
  }
}

double ipow(double x, int k) {
  double r = 1.0;
  for (; k > 0; --k) r *= x;
  return r;
}

Directions random_directions(const MassSystem& sys, const Blocks& b, std::mt19937_64& rng) {
  thread_local std::vector<double> cm;
  std::normal_distribution<double> normal(0.0, 1.0);
  Directions d{Configuration::zeros(sys), Configuration::zeros(sys)};
  double q_norm = 0.0, xi_norm = 0.0;
  // P0(Z) already removes the total centre of mass.
  do {
    fill_gaussian(sys, d.q, normal, rng);
    to_internal(sys, b, d.q, cm);
    q_norm = mass_norm(sys, d.q);
  } while (q_norm == 0.0);
  do {
    fill_gaussian(sys, d.xi, normal, rng);
    d.xi = remove_center_of_mass(sys, d.xi);
    to_centres(sys, b, d.xi, cm);
    xi_norm = mass_norm(sys, d.xi);
  } while (xi_norm == 0.0);
  d.q *= 1.0 / q_norm;
  d.xi *= 1.0 / xi_norm;
  return d;
}

}  // namespace

Configuration gaussian_relative(const MassSystem& sys, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Configuration g = Configuration::zeros(sys);
  fill_gaussian(sys, g, normal, rng);
  return remove_center_of_mass(sys, g);
}

ConeSampler::ConeSampler(const MassSystem& sys, Partition z, double kappa)
    : sys_(sys), z_(std::move(z)), blocks_(blocks_of(sys, z_)), kappa_(kappa) {
  if (z_.particles() != sys.particles()) throw ArgumentError("partition does not match the system");
  if (z_.order() <= 1 || z_.order() >= sys.particles())
    throw ArgumentError("cone sampling needs 1 < |Z| < N, got " + z_.label());
  if (!(kappa > 0.0)) throw ArgumentError("cone aperture must be positive");
  q_dim_ = sys.dim() * (sys.particles() - z_.order());
  xi_dim_ = sys.dim() * (z_.order() - 1);
  const Eigen::MatrixXd p0 = internal_projector(sys, z_);
  const Eigen::MatrixXd p_rel = internal_projector(sys, Partition::single_cluster(sys.particles()));
  q_basis_ = range_basis(sys, p0, q_dim_);
  xi_basis_ = range_basis(sys, p_rel - p0, xi_dim_);
}

Configuration ratio_point(const MassSystem& sys, const Partition& z, double t, std::mt19937_64& rng) {
  if (z.order() <= 1 || z.order() >= sys.particles())
    throw ArgumentError("ratio_point needs 1 < |Z| < N, got " + z.label());
  if (!(t >= 0.0)) throw ArgumentError("ratio must be non-negative");
  const auto d = random_directions(sys, blocks_of(sys, z), rng);
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  return c * d.xi + (t * c) * d.q;
}

Configuration ConeSampler::draw(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Configuration q = Configuration::zeros(sys_);
  Configuration xi = Configuration::zeros(sys_);
  unit_in_span(q_basis_, q_dim_, q.coords(), normal, rng);
  unit_in_span(xi_basis_, xi_dim_, xi.coords(), normal, rng);

  // Polar angle theta in [0, atan kappa] with density sin^(dq-1) cos^(dxi-1).
  // Proposal theta = Theta * U^(1/dq) has density proportional to theta^(dq-1).
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double theta_max = std::atan(kappa_);
  double theta = 0.0;
  while (true) {
    theta = theta_max * std::pow(unif(rng), 1.0 / q_dim_);
    const double sinc = theta > 0.0 ? std::sin(theta) / theta : 1.0;
    const double w = ipow(sinc, q_dim_ - 1) * ipow(std::cos(theta), xi_dim_ - 1);
    if (unif(rng) < w) break;
  }
  q *= std::sin(theta);
  const double c = std::cos(theta);
  for (std::size_t k = 0; k < q.size(); ++k) q[k] += c * xi[k];
  return q;
}

InternalBoundReport check_internal_lower_bound(const MassSystem& sys, const Partition& z,
                                               const Cluster& c, const AzsLadder& ladder,
                                               long samples, std::uint64_t seed) {
  if (samples < 1) throw ArgumentError("samples must be positive");
  if (z.particles() != sys.particles()) throw ArgumentError("partition does not match the system");
  if (c.members().back() >= sys.particles()) throw ArgumentError("cluster out of range");
  if (z.covers(c))
    throw ArgumentError("cluster " + c.label() + " lies inside a cluster of " + z.label() +
                        "; the lower bound does not apply");
  const int l = z.order();
  const double d = ladder.d(l);
  const ConeSampler sampler(sys, z, ladder.kappa(l));
  const auto lower = lower_cones(sys, ladder, l);

  const Blocks zb = blocks_of(sys, z);
  std::vector<double> cm;
  std::mt19937_64 rng(seed);
  InternalBoundReport rep;
  rep.worst_ratio = std::numeric_limits<double>::infinity();
  const long budget = 1000 * samples + 1000;
  while (rep.samples < samples) {
    if (rep.draws >= budget) {
      std::ostringstream os;
      os << "shell of " << z.label() << ": " << rep.samples << " of " << samples << " samples after "
         << rep.draws << " draws";
      throw SamplingExhausted(os.str(), rep.samples, rep.draws);
    }
    ++rep.draws;
    const auto x = sampler.draw(rng);
    if (absorbing_cone(sys, lower, x, cm)) continue;
    ++rep.samples;
    const double inner = mass_norm(sys, project_internal(sys, c, x));
    const double centre = std::sqrt(split(sys, zb, x, cm).xi_sq);
    const double r = inner / (d * centre);
    rep.worst_ratio = std::min(rep.worst_ratio, r);
    if (inner < d * centre) ++rep.violations;
  }
  return rep;
}

SeparationReport check_cone_separation(const MassSystem& sys, const Partition& hat,
                                       const Partition& tilde, const AzsLadder& ladder,
                                       long samples, std::uint64_t seed) {
  if (samples < 1) throw ArgumentError("samples must be positive");
  if (hat == tilde) throw ArgumentError("cone separation needs two distinct partitions");
  if (hat.order() != tilde.order()) throw ArgumentError("cone separation needs partitions of equal order");
  const int l = hat.order();
  const double kappa = ladder.kappa(l);
  const auto lower = lower_cones(sys, ladder, l);

  SeparationReport rep;
  rep.order = l;
  rep.worst_margin = std::numeric_limits<double>::infinity();

  // Draw from each cone and test membership in the other one.
  const ConeSampler from_hat(sys, hat, kappa);
  const ConeSampler from_tilde(sys, tilde, kappa);
  const Blocks hb = blocks_of(sys, hat);
  const Blocks tb = blocks_of(sys, tilde);
  std::vector<double> cm;
  std::mt19937_64 rng(seed);
  for (long k = 0; k < samples; ++k) {
    const bool even = k % 2 == 0;
    const auto x = (even ? from_hat : from_tilde).draw(rng);
    ++rep.samples;
    const double t = ratio(sys, even ? tb : hb, x, cm);
    const bool both = t <= kappa;
    if (both) ++rep.in_both;
    const double margin = t / kappa - 1.0;
    // Absorption only matters if the sample could count.
    if (!both && margin >= rep.worst_margin) continue;
    if (absorbing_cone(sys, lower, x, cm)) continue;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (both) ++rep.violations;
  }

  // Targeted pass: both cones lie within K(J, kappa_s), J the join, where
  // kappa_s^2 = 2 kappa^2 / (c - 2 kappa^2) and c bounds P0(hat) + P0(tilde)
  // from below on X0(J).
  const Partition j = join(hat, tilde);
  if (j.order() == 1) {
    rep.intersection_is_origin = true;
    return rep;
  }
  const double c = intersection_constant(sys, hat, tilde, j);
  if (!(c > 2.0 * kappa * kappa)) return rep;
  const double kappa_s = std::sqrt(2.0 * kappa * kappa / (c - 2.0 * kappa * kappa));
  const ConeSampler around_join(sys, j, kappa_s);
  std::seed_seq seq{seed, std::uint64_t{0x9e3779b97f4a7c15ULL}};
  std::mt19937_64 rng2(seq);
  const long budget = 200 * samples;
  while (rep.intersection_samples < samples && rep.intersection_draws < budget) {
    ++rep.intersection_draws;
    const auto x = around_join.draw(rng2);
    if (ratio(sys, hb, x, cm) > kappa || ratio(sys, tb, x, cm) > kappa) continue;
    ++rep.intersection_samples;
    if (const auto* cone = absorbing_cone(sys, lower, x, cm))
      ++rep.absorbed[cone->label];
    else
      ++rep.intersection_violations;
  }
  return rep;
}

}  // namespace vlab::geometry
