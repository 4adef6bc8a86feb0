#pragma once

// Configuration-space geometry of N particles in R^n under the mass-weighted
// inner product <x,y>_m = sum_i m_i <x_i,y_i>.
//
// A configuration is stored flat: coordinate a of particle i lives at
// index i*n + a. Particle indices are 0-based in code and 1-based in every
// human-readable label.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vlab::geometry {

class MassSystem {
 public:
  MassSystem(int dim, std::vector<double> masses);

  int dim() const noexcept { return dim_; }
  int particles() const noexcept { return static_cast<int>(masses_.size()); }
  const std::vector<double>& masses() const noexcept { return masses_; }
  double mass(int i) const { return masses_.at(static_cast<std::size_t>(i)); }
  /// M = sum of all masses.
  double total_mass() const noexcept { return total_; }
  /// m = smallest mass.
  double min_mass() const noexcept { return min_; }
  std::size_t coordinate_count() const noexcept {
    return static_cast<std::size_t>(dim_) * masses_.size();
  }

 private:
  int dim_;
  std::vector<double> masses_;
  double total_ = 0.0;
  double min_ = 0.0;
};

class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<double> coords) : coords_(std::move(coords)) {}
  static Configuration zeros(const MassSystem& sys) {
    return Configuration(std::vector<double>(sys.coordinate_count(), 0.0));
  }

  std::size_t size() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  std::span<double> coords() noexcept { return coords_; }
  double operator[](std::size_t k) const { return coords_[k]; }
  double& operator[](std::size_t k) { return coords_[k]; }

  Configuration& operator+=(const Configuration& other);
  Configuration& operator-=(const Configuration& other);
  Configuration& operator*=(double s);

  friend Configuration operator+(Configuration a, const Configuration& b) { return a += b; }
  friend Configuration operator-(Configuration a, const Configuration& b) { return a -= b; }
  friend Configuration operator*(double s, Configuration a) { return a *= s; }

 private:
  std::vector<double> coords_;
};

/// Nonempty set of particle indices, kept sorted.
class Cluster {
 public:
  explicit Cluster(std::vector<int> members);
  static Cluster from_one_based(std::vector<int> members);

  const std::vector<int>& members() const noexcept { return members_; }
  int size() const noexcept { return static_cast<int>(members_.size()); }
  bool contains(int i) const;
  bool subset_of(const Cluster& other) const;
  std::string label() const;

  auto operator<=>(const Cluster&) const = default;

 private:
  std::vector<int> members_;
};

/// Disjoint clusters covering {0..N-1}, in canonical order (by smallest member).
class Partition {
 public:
  Partition(std::vector<Cluster> clusters, int particles);
  static Partition single_cluster(int particles);
  static Partition singletons(int particles);

  int order() const noexcept { return static_cast<int>(clusters_.size()); }
  int particles() const noexcept { return static_cast<int>(cluster_of_.size()); }
  const std::vector<Cluster>& clusters() const noexcept { return clusters_; }
  const Cluster& cluster(int k) const { return clusters_.at(static_cast<std::size_t>(k)); }
  /// Index (into clusters()) of the cluster holding particle i.
  int cluster_of(int i) const { return cluster_of_.at(static_cast<std::size_t>(i)); }
  /// Some cluster of this partition contains every member of c.
  bool covers(const Cluster& c) const;
  /// Partition obtained by uniting clusters a and b (indices into clusters()).
  Partition merged(int a, int b) const;
  std::string label() const;

  bool operator==(const Partition& other) const { return clusters_ == other.clusters_; }

 private:
  std::vector<Cluster> clusters_;
  std::vector<int> cluster_of_;
};

/// Reads a label such as "({1,2},{3})" (1-based members). Throws ArgumentError.
Partition parse_partition(std::string_view text, int particles);

/// Every set partition of {0..N-1}, ordered by order then label.
std::vector<Partition> all_partitions(int particles);
std::vector<Partition> partitions_of_order(int particles, int order);
/// Finest common coarsening.
Partition join(const Partition& a, const Partition& b);
/// True when every cluster of fine lies inside a cluster of coarse.
bool refines(const Partition& fine, const Partition& coarse);

double mass_inner(const MassSystem& sys, const Configuration& x, const Configuration& y);
double mass_norm(const MassSystem& sys, const Configuration& x);

/// x_c[C] = (1/M[C]) sum_{i in C} m_i x_i.
std::vector<double> cluster_cm(const MassSystem& sys, const Cluster& c, const Configuration& x);
double cluster_mass(const MassSystem& sys, const Cluster& c);

/// P0[C]: x_i - x_c[C] on C, zero elsewhere.
Configuration project_internal(const MassSystem& sys, const Cluster& c, const Configuration& x);
/// Pc[C]: x_c[C] on C, zero elsewhere.
Configuration project_cluster_cm(const MassSystem& sys, const Cluster& c, const Configuration& x);
/// Orthogonal projection of X onto X0 (removes the total centre of mass).
Configuration remove_center_of_mass(const MassSystem& sys, const Configuration& x);
/// |sum m_i x_i| <= tol * |x|_m, i.e. x lies in X0.
bool is_relative(const MassSystem& sys, const Configuration& x, double tol = 1e-12);

struct PartitionSplit {
  Configuration q;   // P0(Z) x, intra-cluster coordinates
  Configuration xi;  // Pc(Z) x, cluster centres of mass
};

/// Throws ArgumentError unless x lies in X0.
PartitionSplit project_partition(const MassSystem& sys, const Partition& z, const Configuration& x);

struct SplitNorms {
  double q_sq = 0.0;
  double xi_sq = 0.0;
};

/// |q(Z)|_m^2 and |xi(Z)|_m^2 computed directly (no X0 check, no cancellation).
SplitNorms split_norms(const MassSystem& sys, const Partition& z, const Configuration& x);

struct IdentityPair {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| / (1 + |lhs|)
  double defect() const;
};

IdentityPair gram_identity_internal(const MassSystem& sys, const Cluster& c, const Configuration& x,
                                    const Configuration& y);
IdentityPair gram_identity_cm(const MassSystem& sys, const Partition& z, const Configuration& x,
                              const Configuration& y);
/// Change of <Pc(Z)x,Pc(Z)y>_m when two clusters of Z are merged into z_merged,
/// against the reduced-mass closed form.
IdentityPair merge_difference(const MassSystem& sys, const Partition& z, const Partition& z_merged,
                              const Configuration& x, const Configuration& y);

struct IdentitySuiteReport {
  int particles = 0;
  int dim = 0;
  int draws = 0;
  // Worst IdentityPair::defect() over the draws.
  double internal = 0.0;
  double centre_of_mass = 0.0;
  double merge = 0.0;
};

/// Seeded draws of fresh masses (uniform in [mass_lo, mass_hi]), relative
/// configurations x, y, a random cluster, a random partition and a random
/// merge of two of its clusters; records the worst defect of each identity.
IdentitySuiteReport identity_suite(int particles, int dim, int draws, double mass_lo, double mass_hi,
                                   std::uint64_t seed);

/// Cone membership. One-cluster partition: |x|_m <= kappa (a ball).
/// All-singleton partition: q = 0, always inside.
bool in_cone(const MassSystem& sys, const Partition& z, double kappa, const Configuration& x);

// ---------------------------------------------------------------------------
// AZS ladder

struct LadderRung {
  int l = 0;
  double kappa = 0.0;
  double kappa_prime = 0.0;
  /// d(l) is defined from l = 2 on.
  std::optional<double> d;
};

/// The three sides of the double inequality defining kappa(l) for l >= 2.
struct RungInequality {
  double left = 0.0;    // (m^3/M^3)(k'(l-1)^2 - k(l)^2)/(1+k'(l-1)^2) - k(l)^2
  double d_sq = 0.0;    // d^2(l)
  double right = 0.0;   // k(l)^2 (1 + k(l)^2)
  bool holds() const { return left > d_sq && d_sq > right; }
};

class AzsLadder {
 public:
  AzsLadder() = default;
  explicit AzsLadder(std::vector<LadderRung> rungs);

  int l_max() const noexcept { return static_cast<int>(rungs_.size()); }
  const std::vector<LadderRung>& rungs() const noexcept { return rungs_; }
  const LadderRung& rung(int l) const;
  double kappa(int l) const { return rung(l).kappa; }
  double kappa_prime(int l) const { return rung(l).kappa_prime; }
  double d(int l) const;

  /// Copy with kappa(l) multiplied by factor. Used for negative controls; the
  /// result generally violates the defining inequalities.
  AzsLadder with_kappa_scaled(int l, double factor) const;

 private:
  std::vector<LadderRung> rungs_;
};

/// d^2(l+1) = (m^3 / 2M^3) k'(l)^2 / (1 + k'(l)^2).
double ladder_d_sq(const MassSystem& sys, double kappa_prime_prev);
RungInequality rung_inequality(const MassSystem& sys, const AzsLadder& ladder, int l);

AzsLadder azs_ladder(const MassSystem& sys, int l_max, double kappa1, double kappa1_prime);

// ---------------------------------------------------------------------------
// Sampling checks

namespace detail {
/// Cluster owner of each particle and cluster masses, for allocation-free loops.
struct Blocks {
  int order = 0;
  std::vector<int> owner;
  std::vector<double> mass;
  std::vector<double> inv_mass;
};
Blocks blocks_of(const MassSystem& sys, const Partition& z);
}  // namespace detail

/// Uniform sampler of the unit mass-sphere of X0 restricted to K(Z, kappa),
/// for 1 < |Z| < N. Directions inside X0(Z) and Xc(Z) are drawn independently;
/// the polar angle is drawn by rejection from its exact density.
class ConeSampler {
 public:
  ConeSampler(const MassSystem& sys, Partition z, double kappa);
  Configuration draw(std::mt19937_64& rng) const;
  const Partition& partition() const noexcept { return z_; }
  double kappa() const noexcept { return kappa_; }

 private:
  MassSystem sys_;
  Partition z_;
  detail::Blocks blocks_;
  double kappa_;
  int q_dim_;
  int xi_dim_;
  // Mass-orthonormal bases of X0(Z) and Xc(Z) within X0, column-major.
  std::vector<double> q_basis_;
  std::vector<double> xi_basis_;
};

/// Isotropic (mass-metric) Gaussian vector in X0.
Configuration gaussian_relative(const MassSystem& sys, std::mt19937_64& rng);

/// Random unit vector of X0 with |q(Z)|_m / |xi(Z)|_m = t, for 1 < |Z| < N.
/// The q and xi directions are independent and isotropic in their subspaces.
Configuration ratio_point(const MassSystem& sys, const Partition& z, double t, std::mt19937_64& rng);

struct InternalBoundReport {
  long samples = 0;
  long draws = 0;
  long violations = 0;
  /// min over samples of |P0[C]x|_m / (d(|Z|) |Pc(Z)x|_m)
  double worst_ratio = 0.0;
};

/// Samples the shell K(Z, kappa(|Z|)) minus every lower-order cone
/// K(Z', kappa'(|Z'|)) and counts points with |P0[C]x|_m < d(|Z|)|Pc(Z)x|_m.
InternalBoundReport check_internal_lower_bound(const MassSystem& sys, const Partition& z,
                                               const Cluster& c, const AzsLadder& ladder,
                                               long samples, std::uint64_t seed);

struct SeparationReport {
  int order = 0;
  /// Points drawn from K(hat) and K(tilde), alternating.
  long samples = 0;
  /// Of those, points lying in the other cone as well.
  long in_both = 0;
  /// Points in both cones and in no lower-order cone.
  long violations = 0;
  /// min over non-absorbed samples of t_other / kappa(l) - 1 (negative = violation).
  double worst_margin = 0.0;
  /// Targeted sampling of the intersection itself, drawn from a cone around
  /// Xc(join(hat, tilde)) that provably contains it.
  bool intersection_is_origin = false;
  long intersection_samples = 0;
  long intersection_draws = 0;
  long intersection_violations = 0;
  /// Label of the first lower-order cone containing each intersection point.
  std::map<std::string, long> absorbed;
};

SeparationReport check_cone_separation(const MassSystem& sys, const Partition& hat,
                                       const Partition& tilde, const AzsLadder& ladder,
                                       long samples, std::uint64_t seed);

}  // namespace vlab::geometry
