#include <cmath>
#include <sstream>

#include "vlab/errors.hpp"
#include "vlab/geometry.hpp"

namespace vlab::geometry {

namespace {

// Largest k in (0, hi) with pred(k) true, for pred true near 0 and false at hi.
template <class Pred>
double upper_endpoint(Pred pred, double hi) {
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

double mass_ratio_cubed(const MassSystem& sys) {
  const double r = sys.min_mass() / sys.total_mass();
  return r * r * r;
}

RungInequality evaluate(double a, double kp_prev, double k, double d_sq) {
  const double kp2 = kp_prev * kp_prev;
  const double k2 = k * k;
  return {a * (kp2 - k2) / (1.0 + kp2) - k2, d_sq, k2 * (1.0 + k2)};
}

}  // namespace

AzsLadder::AzsLadder(std::vector<LadderRung> rungs) : rungs_(std::move(rungs)) {
  for (std::size_t k = 0; k < rungs_.size(); ++k)
    if (rungs_[k].l != static_cast<int>(k) + 1) throw ArgumentError("ladder rungs must be numbered 1..l_max");
}

const LadderRung& AzsLadder::rung(int l) const {
  if (l < 1 || l > l_max()) {
    std::ostringstream os;
    os << "ladder has no rung " << l << " (l_max = " << l_max() << ")";
    throw ArgumentError(os.str());
  }
  return rungs_[static_cast<std::size_t>(l - 1)];
}

double AzsLadder::d(int l) const {
  const auto& r = rung(l);
  if (!r.d) throw ArgumentError("d(1) is not defined");
  return *r.d;
}

AzsLadder AzsLadder::with_kappa_scaled(int l, double factor) const {
  AzsLadder copy = *this;
  copy.rungs_.at(static_cast<std::size_t>(l - 1)).kappa *= factor;
  return copy;
}

double ladder_d_sq(const MassSystem& sys, double kappa_prime_prev) {
  const double kp2 = kappa_prime_prev * kappa_prime_prev;
  return 0.5 * mass_ratio_cubed(sys) * kp2 / (1.0 + kp2);
}

RungInequality rung_inequality(const MassSystem& sys, const AzsLadder& ladder, int l) {
  if (l < 2) throw ArgumentError("the defining inequality starts at l = 2");
  const auto& cur = ladder.rung(l);
  const auto& prev = ladder.rung(l - 1);
  const double d = cur.d.value_or(0.0);
  return evaluate(mass_ratio_cubed(sys), prev.kappa_prime, cur.kappa, d * d);
}

AzsLadder azs_ladder(const MassSystem& sys, int l_max, double kappa1, double kappa1_prime) {
  if (!(kappa1 > 0.0) || !(kappa1_prime > 0.0) || !(kappa1_prime < kappa1))
    throw ArgumentError("need 0 < kappa'(1) < kappa(1)");
  if (l_max < 2 || l_max > sys.particles() - 1) {
    std::ostringstream os;
    os << "l_max must lie in [2, N-1] = [2, " << sys.particles() - 1 << "], got " << l_max;
    throw ArgumentError(os.str());
  }
  const double a = mass_ratio_cubed(sys);
  std::vector<LadderRung> rungs{{1, kappa1, kappa1_prime, std::nullopt}};
  for (int l = 1; l < l_max; ++l) {
    const double kp = rungs.back().kappa_prime;
    const double d_sq = ladder_d_sq(sys, kp);
    const double k_left = upper_endpoint([&](double k) { return evaluate(a, kp, k, d_sq).left > d_sq; }, kp);
    const double k_right =
        upper_endpoint([&](double k) { return evaluate(a, kp, k, d_sq).right < d_sq; }, std::sqrt(std::sqrt(d_sq)) + 1.0);
    const double k_max = std::min(k_left, k_right);
    const double k = 0.5 * k_max;
    const auto check = evaluate(a, kp, k, d_sq);
    if (!(k > 0.0) || !check.holds()) {
      std::ostringstream os;
      os.precision(17);
      os << "no feasible kappa(" << l + 1 << "): kappa'(" << l << ") = " << kp << ", d^2 = " << d_sq
         << ", left endpoint " << k_left << ", right endpoint " << k_right;
      throw ConstructionError(os.str());
    }
    rungs.push_back({l + 1, k, 0.5 * k, std::sqrt(d_sq)});
  }
  return AzsLadder(std::move(rungs));
}

}  // namespace vlab::geometry
