#include "vlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vlab/errors.hpp"

namespace vlab::geometry {

namespace {

void require_shape(const MassSystem& sys, const Configuration& x, const char* what) {
  if (x.size() != sys.coordinate_count()) {
    std::ostringstream os;
    os << what << ": configuration has " << x.size() << " coordinates, system expects "
       << sys.coordinate_count();
    throw ArgumentError(os.str());
  }
}

void require_cluster(const MassSystem& sys, const Cluster& c) {
  if (c.members().back() >= sys.particles())
    throw ArgumentError("cluster " + c.label() + " refers to a particle outside the system");
}

void require_partition(const MassSystem& sys, const Partition& z) {
  if (z.particles() != sys.particles())
    throw ArgumentError("partition " + z.label() + " does not match the particle count");
}

// sum_i m_i x_i
std::vector<double> weighted_sum(const MassSystem& sys, const Configuration& x) {
  const int n = sys.dim();
  std::vector<double> s(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < sys.particles(); ++i)
    for (int a = 0; a < n; ++a) s[a] += sys.mass(i) * x[static_cast<std::size_t>(i * n + a)];
  return s;
}

// x - sum_C P0[C]x, which equals the coordinate formula x_c[C] on each C.
Configuration centre_part(const MassSystem& sys, const Partition& z, const Configuration& x) {
  Configuration xi = x;
  for (const auto& c : z.clusters()) xi -= project_internal(sys, c, x);
  return xi;
}

std::string join_labels(const std::vector<Cluster>& clusters) {
  std::string s = "(";
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    if (k) s += ",";
    s += clusters[k].label();
  }
  return s + ")";
}

}  // namespace

MassSystem::MassSystem(int dim, std::vector<double> masses) : dim_(dim), masses_(std::move(masses)) {
  if (dim_ < 1) throw ArgumentError("spatial dimension must be positive");
  if (masses_.size() < 2) throw ArgumentError("a mass system needs at least two particles");
  for (double m : masses_)
    if (!(m > 0.0) || !std::isfinite(m)) throw ArgumentError("masses must be finite and positive");
  total_ = std::accumulate(masses_.begin(), masses_.end(), 0.0);
  min_ = *std::min_element(masses_.begin(), masses_.end());
}

Configuration& Configuration::operator+=(const Configuration& other) {
  if (other.size() != size()) throw ArgumentError("configuration size mismatch");
  for (std::size_t k = 0; k < size(); ++k) coords_[k] += other.coords_[k];
  return *this;
}

Configuration& Configuration::operator-=(const Configuration& other) {
  if (other.size() != size()) throw ArgumentError("configuration size mismatch");
  for (std::size_t k = 0; k < size(); ++k) coords_[k] -= other.coords_[k];
  return *this;
}

Configuration& Configuration::operator*=(double s) {
  for (double& v : coords_) v *= s;
  return *this;
}

Cluster::Cluster(std::vector<int> members) : members_(std::move(members)) {
  if (members_.empty()) throw ArgumentError("cluster must be nonempty");
  std::sort(members_.begin(), members_.end());
  if (members_.front() < 0) throw ArgumentError("cluster index out of range");
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    throw ArgumentError("cluster has duplicate members");
}

Cluster Cluster::from_one_based(std::vector<int> members) {
  for (int& i : members) {
    if (i < 1) throw ArgumentError("particle labels start at 1");
    --i;
  }
  return Cluster(std::move(members));
}

bool Cluster::contains(int i) const { return std::binary_search(members_.begin(), members_.end(), i); }

bool Cluster::subset_of(const Cluster& other) const {
  return std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
}

std::string Cluster::label() const {
  std::string s = "{";
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(members_[k] + 1);
  }
  return s + "}";
}

Partition::Partition(std::vector<Cluster> clusters, int particles) : clusters_(std::move(clusters)) {
  if (particles < 1) throw ArgumentError("partition needs at least one particle");
  if (clusters_.empty()) throw ArgumentError("partition needs at least one cluster");
  std::sort(clusters_.begin(), clusters_.end(),
            [](const Cluster& a, const Cluster& b) { return a.members().front() < b.members().front(); });
  cluster_of_.assign(static_cast<std::size_t>(particles), -1);
  for (std::size_t k = 0; k < clusters_.size(); ++k) {
    for (int i : clusters_[k].members()) {
      if (i >= particles) throw ArgumentError("cluster " + clusters_[k].label() + " is out of range");
      if (cluster_of_[static_cast<std::size_t>(i)] != -1)
        throw ArgumentError("clusters of " + join_labels(clusters_) + " are not disjoint");
      cluster_of_[static_cast<std::size_t>(i)] = static_cast<int>(k);
    }
  }
  for (int owner : cluster_of_)
    if (owner == -1) throw ArgumentError("partition " + join_labels(clusters_) + " does not cover all particles");
}

Partition Partition::single_cluster(int particles) {
  std::vector<int> all(static_cast<std::size_t>(particles));
  std::iota(all.begin(), all.end(), 0);
  return Partition({Cluster(all)}, particles);
}

Partition Partition::singletons(int particles) {
  std::vector<Cluster> cs;
  for (int i = 0; i < particles; ++i) cs.emplace_back(std::vector<int>{i});
  return Partition(std::move(cs), particles);
}

bool Partition::covers(const Cluster& c) const {
  const int owner = cluster_of(c.members().front());
  return std::all_of(c.members().begin(), c.members().end(), [&](int i) { return cluster_of(i) == owner; });
}

Partition Partition::merged(int a, int b) const {
  if (a == b || a < 0 || b < 0 || a >= order() || b >= order())
    throw ArgumentError("merge needs two distinct cluster indices");
  std::vector<Cluster> cs;
  std::vector<int> united = clusters_[static_cast<std::size_t>(a)].members();
  const auto& mb = clusters_[static_cast<std::size_t>(b)].members();
  united.insert(united.end(), mb.begin(), mb.end());
  for (int k = 0; k < order(); ++k)
    if (k != a && k != b) cs.push_back(clusters_[static_cast<std::size_t>(k)]);
  cs.emplace_back(std::move(united));
  return Partition(std::move(cs), particles());
}

std::string Partition::label() const { return join_labels(clusters_); }

Partition parse_partition(std::string_view text, int particles) {
  auto fail = [&] { throw ArgumentError("cannot read partition '" + std::string(text) + "'"); };
  std::vector<Cluster> clusters;
  std::vector<int> current;
  bool open = false;
  int value = -1;
  for (char ch : text) {
    if (ch == ' ' || ((ch == '(' || ch == ')') && !open)) continue;
    if (ch >= '0' && ch <= '9') {
      if (!open) fail();
      value = (value < 0 ? 0 : value * 10) + (ch - '0');
      if (value > 1000) fail();
      continue;
    }
    if (value >= 0 && (ch == ',' || ch == '}')) {
      current.push_back(value);
      value = -1;
    }
    if (ch == '{') {
      if (open) fail();
      open = true;
    } else if (ch == '}') {
      if (!open || current.empty()) fail();
      clusters.push_back(Cluster::from_one_based(current));
      current.clear();
      open = false;
    } else if (ch != ',') {
      fail();
    }
  }
  if (open || clusters.empty()) fail();
  return Partition(std::move(clusters), particles);
}

std::vector<Partition> all_partitions(int particles) {
  if (particles < 1) throw ArgumentError("need at least one particle");
  std::vector<Partition> out;
  // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(static_cast<std::size_t>(particles), 0);
  while (true) {
    const int blocks = *std::max_element(a.begin(), a.end()) + 1;
    std::vector<std::vector<int>> members(static_cast<std::size_t>(blocks));
    for (int i = 0; i < particles; ++i) members[static_cast<std::size_t>(a[i])].push_back(i);
    std::vector<Cluster> cs;
    for (auto& m : members) cs.emplace_back(std::move(m));
    out.emplace_back(std::move(cs), particles);

    int i = particles - 1;
    for (; i > 0; --i) {
      const int prefix_max = *std::max_element(a.begin(), a.begin() + i);
      if (a[i] <= prefix_max) {
        ++a[i];
        std::fill(a.begin() + i + 1, a.end(), 0);
        break;
      }
    }
    if (i == 0) break;
  }
  std::stable_sort(out.begin(), out.end(), [](const Partition& x, const Partition& y) {
    if (x.order() != y.order()) return x.order() < y.order();
    return x.clusters() < y.clusters();
  });
  return out;
}

std::vector<Partition> partitions_of_order(int particles, int order) {
  std::vector<Partition> out;
  for (auto& p : all_partitions(particles))
    if (p.order() == order) out.push_back(std::move(p));
  return out;
}

Partition join(const Partition& a, const Partition& b) {
  if (a.particles() != b.particles()) throw ArgumentError("join of partitions of different systems");
  const int n = a.particles();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const Partition* p : {&a, &b})
    for (const auto& c : p->clusters())
      for (int i : c.members()) parent[find(i)] = find(c.members().front());
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) groups[static_cast<std::size_t>(find(i))].push_back(i);
  std::vector<Cluster> cs;
  for (auto& g : groups)
    if (!g.empty()) cs.emplace_back(std::move(g));
  return Partition(std::move(cs), n);
}

bool refines(const Partition& fine, const Partition& coarse) {
  return std::all_of(fine.clusters().begin(), fine.clusters().end(),
                     [&](const Cluster& c) { return coarse.covers(c); });
}

double mass_inner(const MassSystem& sys, const Configuration& x, const Configuration& y) {
  require_shape(sys, x, "mass_inner");
  require_shape(sys, y, "mass_inner");
  const int n = sys.dim();
  double s = 0.0;
  for (int i = 0; i < sys.particles(); ++i) {
    double dot = 0.0;
    for (int a = 0; a < n; ++a) {
      const auto k = static_cast<std::size_t>(i * n + a);
      dot += x[k] * y[k];
    }
    s += sys.mass(i) * dot;
  }
  return s;
}

double mass_norm(const MassSystem& sys, const Configuration& x) {
  return std::sqrt(mass_inner(sys, x, x));
}

double cluster_mass(const MassSystem& sys, const Cluster& c) {
  require_cluster(sys, c);
  double m = 0.0;
  for (int i : c.members()) m += sys.mass(i);
  return m;
}

std::vector<double> cluster_cm(const MassSystem& sys, const Cluster& c, const Configuration& x) {
  require_shape(sys, x, "cluster_cm");
  const double mc = cluster_mass(sys, c);
  const int n = sys.dim();
  std::vector<double> cm(static_cast<std::size_t>(n), 0.0);
  for (int i : c.members())
    for (int a = 0; a < n; ++a) cm[a] += sys.mass(i) * x[static_cast<std::size_t>(i * n + a)];
  for (double& v : cm) v /= mc;
  return cm;
}

Configuration project_internal(const MassSystem& sys, const Cluster& c, const Configuration& x) {
  const auto cm = cluster_cm(sys, c, x);
  const int n = sys.dim();
  Configuration out = Configuration::zeros(sys);
  for (int i : c.members())
    for (int a = 0; a < n; ++a) {
      const auto k = static_cast<std::size_t>(i * n + a);
      out[k] = x[k] - cm[a];
    }
  return out;
}

Configuration project_cluster_cm(const MassSystem& sys, const Cluster& c, const Configuration& x) {
  const auto cm = cluster_cm(sys, c, x);
  const int n = sys.dim();
  Configuration out = Configuration::zeros(sys);
  for (int i : c.members())
    for (int a = 0; a < n; ++a) out[static_cast<std::size_t>(i * n + a)] = cm[a];
  return out;
}

Configuration remove_center_of_mass(const MassSystem& sys, const Configuration& x) {
  require_shape(sys, x, "remove_center_of_mass");
  const auto s = weighted_sum(sys, x);
  const int n = sys.dim();
  Configuration out = x;
  for (int i = 0; i < sys.particles(); ++i)
    for (int a = 0; a < n; ++a) out[static_cast<std::size_t>(i * n + a)] -= s[a] / sys.total_mass();
  return out;
}

bool is_relative(const MassSystem& sys, const Configuration& x, double tol) {
  require_shape(sys, x, "is_relative");
  const auto s = weighted_sum(sys, x);
  double norm_sq = 0.0;
  for (double v : s) norm_sq += v * v;
  // |sum m_i x_i| is measured as the mass-norm of the centre-of-mass component,
  // |P x|_m = |sum m_i x_i| / sqrt(M).
  return std::sqrt(norm_sq / sys.total_mass()) <= tol * mass_norm(sys, x);
}

PartitionSplit project_partition(const MassSystem& sys, const Partition& z, const Configuration& x) {
  require_partition(sys, z);
  if (!is_relative(sys, x)) throw ArgumentError("project_partition: configuration is not in X0");
  Configuration q = Configuration::zeros(sys);
  for (const auto& c : z.clusters()) q += project_internal(sys, c, x);
  Configuration xi = x - q;
  return {std::move(q), std::move(xi)};
}

SplitNorms split_norms(const MassSystem& sys, const Partition& z, const Configuration& x) {
  require_partition(sys, z);
  require_shape(sys, x, "split_norms");
  const int n = sys.dim();
  SplitNorms out;
  double cm[8];
  std::vector<double> cm_heap;
  double* cmp = cm;
  if (n > 8) {
    cm_heap.resize(static_cast<std::size_t>(n));
    cmp = cm_heap.data();
  }
  for (const auto& c : z.clusters()) {
    double mc = 0.0;
    std::fill(cmp, cmp + n, 0.0);
    for (int i : c.members()) {
      const double m = sys.mass(i);
      mc += m;
      for (int a = 0; a < n; ++a) cmp[a] += m * x[static_cast<std::size_t>(i * n + a)];
    }
    double cm_sq = 0.0;
    for (int a = 0; a < n; ++a) {
      cmp[a] /= mc;
      cm_sq += cmp[a] * cmp[a];
    }
    out.xi_sq += mc * cm_sq;
    for (int i : c.members()) {
      double d_sq = 0.0;
      for (int a = 0; a < n; ++a) {
        const double d = x[static_cast<std::size_t>(i * n + a)] - cmp[a];
        d_sq += d * d;
      }
      out.q_sq += sys.mass(i) * d_sq;
    }
  }
  return out;
}

double IdentityPair::defect() const { return std::abs(lhs - rhs) / (1.0 + std::abs(lhs)); }

IdentityPair gram_identity_internal(const MassSystem& sys, const Cluster& c, const Configuration& x,
                                    const Configuration& y) {
  IdentityPair out;
  out.lhs = mass_inner(sys, project_internal(sys, c, x), project_internal(sys, c, y));
  const int n = sys.dim();
  const auto& mem = c.members();
  double sum = 0.0;
  for (int i : mem)
    for (int j : mem) {
      double dot = 0.0;
      for (int a = 0; a < n; ++a) {
        const auto ki = static_cast<std::size_t>(i * n + a);
        const auto kj = static_cast<std::size_t>(j * n + a);
        dot += (x[ki] - x[kj]) * (y[ki] - y[kj]);
      }
      sum += sys.mass(i) * sys.mass(j) * dot;
    }
  out.rhs = sum / (2.0 * cluster_mass(sys, c));
  return out;
}

IdentityPair gram_identity_cm(const MassSystem& sys, const Partition& z, const Configuration& x,
                              const Configuration& y) {
  const auto sx = project_partition(sys, z, x);
  const auto sy = project_partition(sys, z, y);
  IdentityPair out;
  out.lhs = mass_inner(sys, sx.xi, sy.xi);
  std::vector<std::vector<double>> cx, cy;
  std::vector<double> mc;
  for (const auto& c : z.clusters()) {
    cx.push_back(cluster_cm(sys, c, x));
    cy.push_back(cluster_cm(sys, c, y));
    mc.push_back(cluster_mass(sys, c));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < mc.size(); ++k)
    for (std::size_t l = 0; l < mc.size(); ++l) {
      double dot = 0.0;
      for (int a = 0; a < sys.dim(); ++a) dot += (cx[k][a] - cx[l][a]) * (cy[k][a] - cy[l][a]);
      sum += mc[k] * mc[l] * dot;
    }
  out.rhs = sum / (2.0 * sys.total_mass());
  return out;
}

IdentityPair merge_difference(const MassSystem& sys, const Partition& z, const Partition& z_merged,
                              const Configuration& x, const Configuration& y) {
  require_partition(sys, z);
  require_partition(sys, z_merged);
  require_shape(sys, x, "merge_difference");
  require_shape(sys, y, "merge_difference");
  // Locate the two clusters of z that disappear in z_merged.
  std::vector<int> gone;
  for (int k = 0; k < z.order(); ++k) {
    const auto& c = z.cluster(k);
    if (std::find(z_merged.clusters().begin(), z_merged.clusters().end(), c) == z_merged.clusters().end())
      gone.push_back(k);
  }
  if (gone.size() != 2 || !(z.merged(gone[0], gone[1]) == z_merged))
    throw ArgumentError(z_merged.label() + " is not obtained from " + z.label() + " by merging two clusters");

  IdentityPair out;
  out.lhs = mass_inner(sys, centre_part(sys, z, x), centre_part(sys, z, y)) -
            mass_inner(sys, centre_part(sys, z_merged, x), centre_part(sys, z_merged, y));
  const auto& c1 = z.cluster(gone[0]);
  const auto& c2 = z.cluster(gone[1]);
  const double m1 = cluster_mass(sys, c1);
  const double m2 = cluster_mass(sys, c2);
  const auto x1 = cluster_cm(sys, c1, x), x2 = cluster_cm(sys, c2, x);
  const auto y1 = cluster_cm(sys, c1, y), y2 = cluster_cm(sys, c2, y);
  double dot = 0.0;
  for (int a = 0; a < sys.dim(); ++a) dot += (x1[a] - x2[a]) * (y1[a] - y2[a]);
  out.rhs = m1 * m2 / (m1 + m2) * dot;
  return out;
}

bool in_cone(const MassSystem& sys, const Partition& z, double kappa, const Configuration& x) {
  require_partition(sys, z);
  if (!(kappa > 0.0)) throw ArgumentError("cone aperture must be positive");
  if (!is_relative(sys, x)) throw ArgumentError("in_cone: configuration is not in X0");
  if (z.order() == 1) return mass_norm(sys, x) <= kappa;
  if (z.order() == sys.particles()) return true;
  const auto s = split_norms(sys, z, x);
  return s.q_sq <= kappa * kappa * s.xi_sq;
}

}  // namespace vlab::geometry
