#include <algorithm>
#include <random>

#include "vlab/errors.hpp"
#include "vlab/geometry.hpp"

namespace vlab::geometry {

IdentitySuiteReport identity_suite(int particles, int dim, int draws, double mass_lo, double mass_hi,
                                   std::uint64_t seed) {
  if (particles < 2) throw ArgumentError("identity suite needs N >= 2");
  if (dim < 1) throw ArgumentError("identity suite needs n >= 1");
  if (draws < 1) throw ArgumentError("identity suite needs at least one draw");
  if (!(mass_lo > 0.0 && mass_hi >= mass_lo)) throw ArgumentError("mass range must satisfy 0 < lo <= hi");

  const auto partitions = all_partitions(particles);
  std::vector<Partition> mergeable;
  for (const auto& z : partitions)
    if (z.order() >= 2) mergeable.push_back(z);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mass(mass_lo, mass_hi);
  std::uniform_int_distribution<unsigned> subset(1, (1u << particles) - 1);
  std::uniform_int_distribution<std::size_t> pick_z(0, partitions.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_m(0, mergeable.size() - 1);

  IdentitySuiteReport rep{particles, dim, draws};
  std::vector<double> m(static_cast<std::size_t>(particles));
  for (int k = 0; k < draws; ++k) {
    std::generate(m.begin(), m.end(), [&] { return mass(rng); });
    const MassSystem sys(dim, m);
    const auto x = gaussian_relative(sys, rng);
    const auto y = gaussian_relative(sys, rng);

    std::vector<int> members;
    const unsigned bits = subset(rng);
    for (int i = 0; i < particles; ++i)
      if (bits & (1u << i)) members.push_back(i);
    rep.internal = std::max(rep.internal, gram_identity_internal(sys, Cluster(members), x, y).defect());

    const auto& z = partitions[pick_z(rng)];
    rep.centre_of_mass = std::max(rep.centre_of_mass, gram_identity_cm(sys, z, x, y).defect());

    const auto& w = mergeable[pick_m(rng)];
    std::uniform_int_distribution<int> cl(0, w.order() - 1);
    const int a = cl(rng);
    int b = cl(rng);
    while (b == a) b = cl(rng);
    rep.merge = std::max(rep.merge, merge_difference(sys, w, w.merged(a, b), x, y).defect());
  }
  return rep;
}

}  // namespace vlab::geometry
