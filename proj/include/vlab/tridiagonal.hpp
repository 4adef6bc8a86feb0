#pragma once

// Symmetric tridiagonal eigenvalues by Sturm counting and bisection.

#include <cstddef>
#include <utility>
#include <vector>

namespace vlab::linalg {

struct SymTridiagonal {
  std::vector<double> diag;  // n entries
  std::vector<double> off;   // n - 1 entries, off[i] couples i and i + 1

  std::size_t size() const noexcept { return diag.size(); }
  /// Throws ArgumentError on inconsistent sizes or an empty matrix.
  void validate() const;
};

/// Number of eigenvalues strictly below x (LDL^T pivot signs).
long sturm_count(const SymTridiagonal& t, double x);

/// Interval [lo, hi] containing the whole spectrum.
std::pair<double, double> gershgorin_bounds(const SymTridiagonal& t);

/// k-th smallest eigenvalue (0-based), bisected to roughly machine precision
/// relative to the spectral radius.
double kth_eigenvalue(const SymTridiagonal& t, std::size_t k);

/// The k smallest eigenvalues, ascending. Throws ArgumentError if k > size().
std::vector<double> lowest_eigenvalues(const SymTridiagonal& t, std::size_t k);

}  // namespace vlab::linalg
