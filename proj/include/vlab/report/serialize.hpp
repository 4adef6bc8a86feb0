#pragma once

#include <string>
#include <vector>

#include "vlab/report/runner.hpp"

namespace vlab::report {

inline constexpr int kSchemaVersion = 1;

/// Scenario report, schema 1. Non-finite numbers become null.
std::string report_json(const ScenarioResult& r);

inline constexpr const char* kSummaryHeader =
    "scenario,kind,status,d,shape,lambda,epsilon,ground_energy,negative_count,fitted_s,classification";

/// Header plus one row per result.
std::string summary_csv(const std::vector<ScenarioResult>& results);

}  // namespace vlab::report
