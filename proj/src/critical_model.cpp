#include <cmath>
#include <sstream>

#include "vlab/errors.hpp"
#include "vlab/spectral.hpp"

namespace vlab::spectral {

long critical_model_count(double c, double log_r, double step) {
  if (!(c >= 0.0)) throw ArgumentError("coupling c must be non-negative");
  if (!(step > 0.0)) throw ArgumentError("step must be positive");
  if (!(log_r > 0.0)) throw ArgumentError("R must exceed 1");
  const long intervals = std::max(2L, std::lround(log_r / step));
  const double h = log_r / static_cast<double>(intervals);
  linalg::SymTridiagonal t;
  t.diag.assign(static_cast<std::size_t>(intervals - 1), 2.0 / (h * h) + 0.25 - c);
  t.off.assign(static_cast<std::size_t>(intervals - 2), -1.0 / (h * h));
  return linalg::sturm_count(t, 0.0);
}

std::vector<CriticalCount> count_negative_eigenvalues_critical_model_log(double c, const std::vector<double>& log_r_list,
                                                                         double step) {
  std::vector<CriticalCount> out;
  out.reserve(log_r_list.size());
  for (std::size_t i = 0; i < log_r_list.size(); ++i) {
    if (i > 0 && !(log_r_list[i] > log_r_list[i - 1])) throw ArgumentError("R list must be increasing");
    out.push_back({log_r_list[i], critical_model_count(c, log_r_list[i], step)});
  }
  return out;
}

std::vector<CriticalCount> count_negative_eigenvalues_critical_model(double c, const std::vector<double>& r_list,
                                                                     double step) {
  std::vector<double> logs;
  logs.reserve(r_list.size());
  for (double r : r_list) {
    if (!(r > 1.0)) throw ArgumentError("R must exceed 1");
    logs.push_back(std::log(r));
  }
  return count_negative_eigenvalues_critical_model_log(c, logs, step);
}

double count_slope(const std::vector<CriticalCount>& counts) {
  if (counts.size() < 2) throw ArgumentError("slope needs at least two counts");
  double mx = 0, my = 0;
  for (const auto& c : counts) {
    mx += c.log_r;
    my += static_cast<double>(c.count);
  }
  mx /= counts.size();
  my /= counts.size();
  double sxx = 0, sxy = 0;
  for (const auto& c : counts) {
    sxx += (c.log_r - mx) * (c.log_r - mx);
    sxy += (c.log_r - mx) * (static_cast<double>(c.count) - my);
  }
  return sxy / sxx;
}

ThresholdBracket bracket_hardy_threshold(double c_lo, double c_hi, double log_r1, double log_r2, double tol) {
  if (!(c_lo < c_hi)) throw ArgumentError("need c_lo < c_hi");
  if (!(log_r1 < log_r2)) throw ArgumentError("need log_r1 < log_r2");
  auto grows = [&](double c) { return critical_model_count(c, log_r2) > critical_model_count(c, log_r1); };
  if (grows(c_lo) || !grows(c_hi)) {
    std::ostringstream os;
    os << "threshold not bracketed by [" << c_lo << ", " << c_hi << "]";
    throw BracketingError(os.str());
  }
  ThresholdBracket b{c_lo, c_hi, 0};
  while (b.hi - b.lo > tol) {
    const double mid = 0.5 * (b.lo + b.hi);
    (grows(mid) ? b.hi : b.lo) = mid;
    ++b.iterations;
  }
  return b;
}

}  // namespace vlab::spectral
