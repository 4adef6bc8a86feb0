#pragma once

// Declarative scenario files: {"version": 1, "scenarios": [...]}, strict keys.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vlab/spectral.hpp"

namespace vlab::report {

/// Malformed or invalid config. line/column are 1-based and present for
/// syntax errors; semantic errors carry a JSON path in the message instead.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

enum class Kind {
  geometry_identities,
  cone_separation,
  ims_verify,
  fermion_hardy,
  virtual_level,
  decay_fit,
  efimov_count,
};

std::string_view to_string(Kind k);
std::optional<Kind> parse_kind(std::string_view name);
/// Kinds that draw random samples and therefore need a seed.
bool needs_seed(Kind k);

struct GeometryIdentitiesParams {
  std::vector<int> particles{2, 3, 4, 5, 6};
  std::vector<int> dims{1, 2, 3};
  int draws = 1000;
  double mass_lo = 0.1;
  double mass_hi = 10.0;
  double tolerance = 1e-12;
};

struct CorruptLadder {
  double factor = 100.0;  // kappa(l) multiplied for every l >= 2
};

struct ConeSeparationParams {
  std::vector<double> masses;
  int dim = 1;
  int l_max = 0;  // 0: N - 1
  double kappa1 = 1.0;
  double kappa1_prime = 0.5;
  long samples = 10000;
  bool separation = true;
  bool lower_bound = true;
  long lower_bound_samples = 10000;
  std::optional<CorruptLadder> corrupt;
};

struct ImsVerifyParams {
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  double b = 1.0;
  int d = 3;
  int radial_grid = 10000;
  std::vector<double> gaussian_widths{0.5, 1.0, 2.0, 5.0, 10.0};
  std::vector<double> masses{1.0, 1.0, 1.0};
  int dim = 3;
  std::string partition = "({1,2},{3})";
  double kappa = 0.5;
  long cone_samples = 10000;
  long consistency_samples = 3000;
  double bound_tolerance = 1e-9;
  double unity_tolerance = 1e-14;
  double derivative_tolerance = 1e-5;
  /// Shrink b~ by 2 and keep 1% of the log window [kappa', kappa''] (negative control).
  bool corrupt = false;
};

struct FermionHardyParams {
  double rho0 = 1.0;
  double rho1 = 1e4;
  int points = 2000;
  int modes = 10;
  hardy::RadialBoundary boundary = hardy::RadialBoundary::free;
  double expected = 9.0;
  double rel_tol = 1e-2;
};

struct VirtualLevelParams {
  int d = 3;
  int l = 0;
  spectral::PotentialSpec potential;
  spectral::Grid grid;
  std::optional<double> oracle_lambda;
  double rel_tol = 5e-3;
  double energy_tol = 1e-10;
  int sweep_n_max = 64;  // epsilon = 1/n for n = 2..sweep_n_max; 0 disables
};

struct DecayFitParams {
  int d = 3;
  int l = 0;
  spectral::PotentialSpec potential;
  spectral::Grid grid;  // box used for the starting coupling
  double match_radius = 1e3;
  double r_lo = 10.0;
  double r_hi = 1e3;
  int samples_per_decade = 200;
  double marginal_tol = 0.05;
  std::optional<double> expected_s;
  double s_tol = 0.05;
  std::optional<hardy::Classification> expected_classification;
};

struct ThresholdParams {
  double c_lo = 0.2;
  double c_hi = 0.3;
  double log_r1 = 200.0;
  double log_r2 = 400.0;
  double tol = 1e-4;
};

struct EfimovCountParams {
  std::optional<double> c;
  std::vector<double> log_r;  // ln R values, increasing
  double step = 0.02;
  enum class Expect { none, saturate, grow } expect = Expect::none;
  double slope_rel_tol = 0.2;
  std::optional<ThresholdParams> threshold;
};

using Parameters = std::variant<GeometryIdentitiesParams, ConeSeparationParams, ImsVerifyParams, FermionHardyParams,
                                VirtualLevelParams, DecayFitParams, EfimovCountParams>;

struct Scenario {
  std::string name;
  Kind kind = Kind::geometry_identities;
  Parameters parameters;
  /// Canonical JSON text of the parameters object as written in the file.
  std::string parameter_text;
  std::optional<std::uint64_t> seed;
  std::string output;  // file prefix inside the output directory
  bool expect_fail = false;
};

struct Config {
  int version = 1;
  std::vector<Scenario> scenarios;
};

/// Throws ConfigError.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Replaces every seed (the VLAB_SEED_OVERRIDE hook).
void override_seeds(Config& config, std::uint64_t seed);

/// 64-bit FNV-1a of the canonical parameter text, as 16 hex digits.
std::string parameter_digest(const Scenario& s);

}  // namespace vlab::report
