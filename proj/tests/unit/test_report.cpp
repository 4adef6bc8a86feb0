#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vlab/report/config.hpp"
#include "vlab/report/runner.hpp"
#include "vlab/report/serialize.hpp"

using namespace vlab::report;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("vlab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ConfigError config_error(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError("");
}

}  // namespace

TEST_CASE("syntax errors carry line and column") {
  const auto e = config_error("{\n  \"version\": 1,\n  \"scenarios\": [,]\n}");
  CHECK(e.line() == 3);
  CHECK(e.column() == 17);
}

TEST_CASE("semantic validation") {
  CHECK(std::string(config_error(R"({"version": 2, "scenarios": []})").what()).find("version") != std::string::npos);
  CHECK(std::string(config_error(R"({"version": 1, "scenarios": [], "extra": 0})").what()).find("extra") !=
        std::string::npos);

  const auto dup = config_error(R"({"version": 1, "scenarios": [
    {"name": "a", "kind": "fermion_hardy"},
    {"name": "a", "kind": "fermion_hardy"}]})");
  const std::string msg = dup.what();
  CHECK(msg.find("$.scenarios[0]") != std::string::npos);
  CHECK(msg.find("$.scenarios[1]") != std::string::npos);

  // Unknown parameter keys, wrong types, missing seeds, unknown kinds.
  CHECK(std::string(config_error(R"({"version": 1, "scenarios": [
    {"name": "a", "kind": "fermion_hardy", "parameters": {"pionts": 10}}]})").what()).find("pionts") != std::string::npos);
  config_error(R"({"version": 1, "scenarios": [{"name": "a", "kind": "fermion_hardy", "parameters": {"points": "many"}}]})");
  config_error(R"({"version": 1, "scenarios": [{"name": "a", "kind": "ims_verify"}]})");
  config_error(R"({"version": 1, "scenarios": [{"name": "a", "kind": "teleport"}]})");
  config_error(R"({"version": 1, "scenarios": [{"name": "a", "kind": "fermion_hardy", "output": "../x"}]})");
  config_error(R"({"version": 1, "scenarios": [{"name": "", "kind": "fermion_hardy"}]})");
  config_error(R"({"version": 1, "scenarios": [{"name": "w", "kind": "virtual_level",
    "parameters": {"potential": {"shape": "square_well", "depth": -1}}}]})");
}

TEST_CASE("the bundled sample lists seven kinds in file order") {
  const auto cfg = load_config(fs::path(VLAB_CONFIG_DIR) / "sample.json");
  REQUIRE(cfg.scenarios.size() == 7);
  const Kind kinds[] = {Kind::geometry_identities, Kind::cone_separation, Kind::ims_verify, Kind::fermion_hardy,
                        Kind::virtual_level, Kind::decay_fit, Kind::efimov_count};
  for (std::size_t i = 0; i < 7; ++i) CHECK(cfg.scenarios[i].kind == kinds[i]);
  CHECK(parameter_digest(cfg.scenarios[0]).size() == 16);
  CHECK(parameter_digest(cfg.scenarios[0]) != parameter_digest(cfg.scenarios[1]));
  CHECK(cfg.scenarios[5].output == "decay_tail");
}

TEST_CASE("empty config: success and a header-only summary") {
  const auto dir = scratch("empty");
  std::ostringstream log;
  CHECK(run_config(parse_config(R"({"version": 1, "scenarios": []})"), {dir, false, 1}, log) == 0);
  CHECK(slurp(dir / "summary.csv") == std::string(kSummaryHeader) + "\n");
}

TEST_CASE("expected failures count as success, unexpected passes do not") {
  const auto text = [](bool expect_fail, double expected) {
    return std::string(R"({"version": 1, "scenarios": [{"name": "f", "kind": "fermion_hardy", "expect_fail": )") +
           (expect_fail ? "true" : "false") + R"(, "parameters": {"points": 300, "modes": 2, "expected": )" +
           std::to_string(expected) + "}}]}";
  };
  const auto run_one = [](const std::string& t) { return run_scenario(parse_config(t).scenarios.at(0)); };
  CHECK(run_one(text(false, 9.0)).status == Status::pass);
  CHECK(run_one(text(false, 20.0)).status == Status::fail);
  CHECK(run_one(text(true, 20.0)).status == Status::expected_fail);
  CHECK(run_one(text(true, 20.0)).ok());
  CHECK(run_one(text(true, 9.0)).status == Status::unexpected_pass);
  CHECK_FALSE(run_one(text(true, 9.0)).ok());

  const auto dir = scratch("fail");
  std::ostringstream log;
  CHECK(run_config(parse_config(text(false, 20.0)), {dir, false, 1}, log) == 1);
  CHECK(fs::exists(dir / "f.json"));
  CHECK(log.str().find("fail") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs and job counts") {
  const auto cfg = load_config(fs::path(VLAB_CONFIG_DIR) / "sample.json");
  const auto a = scratch("det_a"), b = scratch("det_b");
  std::ostringstream log;
  CHECK(run_config(cfg, {a, true, 1}, log) == 0);
  CHECK(run_config(cfg, {b, true, 3}, log) == 0);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
  CHECK(files >= 8);
  CHECK(fs::exists(a / "decay_tail.svg"));

  const auto report = nlohmann::json::parse(slurp(a / "gaussian_well.json"));
  CHECK(report["schema"] == 1);
  CHECK(report["status"] == "pass");
}

TEST_CASE("seed override replaces every seed") {
  auto cfg = load_config(fs::path(VLAB_CONFIG_DIR) / "sample.json");
  override_seeds(cfg, 99);
  for (const auto& s : cfg.scenarios) CHECK(*s.seed == 99u);
}

TEST_CASE("non-finite numbers serialise as null") {
  ScenarioResult r;
  r.name = "x";
  r.payload["value"] = std::numeric_limits<double>::infinity();
  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["result"]["value"].is_null());
}
