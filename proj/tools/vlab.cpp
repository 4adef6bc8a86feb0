#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vlab/errors.hpp"
#include "vlab/geometry.hpp"
#include "vlab/report/config.hpp"
#include "vlab/report/runner.hpp"

namespace {

using namespace vlab;

int config_failure(const report::ConfigError& e, const std::string& path) {
  std::cerr << "vlab: " << path;
  if (e.line() > 0) std::cerr << ":" << e.line() << ":" << e.column();
  std::cerr << ": " << e.what() << '\n';
  return 2;
}

report::Config load(const std::string& path) {
  auto cfg = report::load_config(path);
  if (const char* env = std::getenv("VLAB_SEED_OVERRIDE"); env && *env) {
    std::uint64_t seed = 0;
    const std::string_view text(env);
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc() || end != text.data() + text.size())
      throw report::ConfigError("VLAB_SEED_OVERRIDE is not an unsigned 64-bit integer: '" + std::string(text) + "'");
    report::override_seeds(cfg, seed);
  }
  return cfg;
}

void print_ladder(const std::vector<double>& masses, int n, int l_max, double kappa1, double kappa1_prime) {
  const geometry::MassSystem sys(n, masses);
  const auto ladder = geometry::azs_ladder(sys, l_max, kappa1, kappa1_prime);
  std::printf("N=%d n=%d m=%.6g M=%.6g\n", sys.particles(), n, sys.min_mass(), sys.total_mass());
  std::printf("%3s %14s %14s %14s %14s %14s %14s\n", "l", "kappa", "kappa'", "d", "left", "d^2", "right");
  for (const auto& r : ladder.rungs()) {
    if (!r.d) {
      std::printf("%3d %14.6e %14.6e %14s %14s %14s %14s\n", r.l, r.kappa, r.kappa_prime, "-", "-", "-", "-");
      continue;
    }
    const auto q = geometry::rung_inequality(sys, ladder, r.l);
    std::printf("%3d %14.6e %14.6e %14.6e %14.6e %14.6e %14.6e\n", r.l, r.kappa, r.kappa_prime, *r.d, q.left, q.d_sq,
                q.right);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual-level lab: scenario runner and AZS ladder tables"};
  app.require_subcommand(1);

  std::string run_path;
  report::RunOptions opts;
  auto* run = app.add_subcommand("run", "Run every scenario of a config file");
  run->add_option("config", run_path, "Scenario file (JSON)")->required();
  run->add_flag("--plots", opts.plots, "Also write SVG plots");
  run->add_option("--jobs", opts.jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--out", opts.out_dir, "Output directory");

  std::string list_path;
  auto* list = app.add_subcommand("list", "List the scenarios of a config file");
  list->add_option("config", list_path, "Scenario file (JSON)")->required();

  std::vector<double> masses;
  int dim = 1, l_max = 0;
  double kappa1 = 1.0, kappa1_prime = 0.5;
  auto* ladder = app.add_subcommand("ladder", "Print an AZS ladder");
  ladder->add_option("--masses", masses, "Particle masses")->required()->delimiter(',');
  ladder->add_option("--n", dim, "Spatial dimension")->required();
  ladder->add_option("--lmax", l_max, "Highest rung")->required();
  ladder->add_option("--kappa1", kappa1, "kappa(1)");
  ladder->add_option("--kappa1-prime", kappa1_prime, "kappa'(1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      try {
        const auto cfg = load(run_path);
        return report::run_config(cfg, opts, std::cout);
      } catch (const report::ConfigError& e) {
        return config_failure(e, run_path);
      }
    }
    if (*list) {
      try {
        const auto cfg = load(list_path);
        for (const auto& s : cfg.scenarios)
          std::cout << s.name << '\t' << report::to_string(s.kind) << '\t' << report::parameter_digest(s) << '\n';
        return 0;
      } catch (const report::ConfigError& e) {
        return config_failure(e, list_path);
      }
    }
    if (*ladder) {
      print_ladder(masses, dim, l_max, kappa1, kappa1_prime);
      return 0;
    }
  } catch (const ArgumentError& e) {
    std::cerr << "vlab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "vlab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
