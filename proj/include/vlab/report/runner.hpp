#pragma once

// Runs scenarios through the numerical modules and collects assertions,
// report payloads and summary rows. The runner only dispatches; every number
// it records comes from a module operation.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlab/report/config.hpp"

namespace vlab::report {

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SummaryRow {
  std::optional<int> d;
  std::string shape;
  std::optional<double> lambda;
  std::optional<double> epsilon;
  std::optional<double> ground_energy;
  std::optional<long> negative_count;
  std::optional<double> fitted_s;
  std::string classification;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

enum class Status { pass, fail, expected_fail, unexpected_pass, error };
std::string_view to_string(Status s);

struct ScenarioResult {
  std::string name;
  Kind kind = Kind::geometry_identities;
  std::optional<std::uint64_t> seed;
  bool expect_fail = false;
  std::string output;
  std::vector<Assertion> assertions;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();
  SummaryRow summary;
  std::vector<Plot> plots;
  std::string error;  // exception text when the scenario could not run
  Status status = Status::pass;

  /// Contract met, counting an observed expected failure as success.
  bool ok() const { return status == Status::pass || status == Status::expected_fail; }
};

ScenarioResult run_scenario(const Scenario& s);

struct RunOptions {
  std::filesystem::path out_dir = "vlab_out";
  bool plots = false;
  int jobs = 1;
};

/// Runs every scenario (up to jobs at once), writes <output>.json per
/// scenario and summary.csv in scenario order, and returns 0 if every
/// scenario is ok, 1 otherwise. Progress lines go to log.
int run_config(const Config& config, const RunOptions& options, std::ostream& log);

}  // namespace vlab::report
