#pragma once

#include <string>

#include "vlab/report/runner.hpp"

namespace vlab::report {

/// Self-contained SVG line chart with linear axes (callers pass logs for log plots).
std::string render_svg(const Plot& plot);

}  // namespace vlab::report
