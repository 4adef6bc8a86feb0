#include "vlab/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vlab/errors.hpp"

namespace vlab::linalg {

void SymTridiagonal::validate() const {
  if (diag.empty()) throw ArgumentError("empty tridiagonal matrix");
  if (off.size() + 1 != diag.size()) throw ArgumentError("off-diagonal must have n - 1 entries");
}

long sturm_count(const SymTridiagonal& t, double x) {
  const std::size_t n = t.size();
  double max_off_sq = 1.0;
  for (double b : t.off) max_off_sq = std::max(max_off_sq, b * b);
  // Same safeguard as LAPACK's dstebz: never divide by a pivot smaller than this.
  const double pivmin = std::numeric_limits<double>::min() * max_off_sq;
  long count = 0;
  double d = t.diag[0] - x;
  if (std::abs(d) < pivmin) d = -pivmin;
  if (d < 0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    d = (t.diag[i] - x) - t.off[i - 1] * t.off[i - 1] / d;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0) ++count;
  }
  return count;
}

std::pair<double, double> gershgorin_bounds(const SymTridiagonal& t) {
  t.validate();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < n) r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  return {lo, hi};
}

double kth_eigenvalue(const SymTridiagonal& t, std::size_t k) {
  t.validate();
  if (k >= t.size()) throw ArgumentError("eigenvalue index exceeds matrix size");
  auto [lo, hi] = gershgorin_bounds(t);
  const double scale = std::max(std::abs(lo), std::abs(hi));
  const double slack = 2.0 * std::numeric_limits<double>::epsilon() * scale + std::numeric_limits<double>::min();
  lo -= slack;
  hi += slack;
  const auto target = static_cast<long>(k);
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(lo) + std::abs(hi)) +
                       std::numeric_limits<double>::min())
      break;
    // Eigenvalue k lies below mid iff more than k eigenvalues are below mid.
    (sturm_count(t, mid) > target ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> lowest_eigenvalues(const SymTridiagonal& t, std::size_t k) {
  t.validate();
  if (k > t.size()) throw ArgumentError("requested more eigenvalues than the matrix has");
  std::vector<double> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(kth_eigenvalue(t, i));
  return out;
}

}  // namespace vlab::linalg
