#include "vlab/report/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace vlab::report {

using ojson = nlohmann::ordered_json;

std::string report_json(const ScenarioResult& r) {
  ojson doc;
  doc["schema"] = kSchemaVersion;
  doc["scenario"] = r.name;
  doc["kind"] = to_string(r.kind);
  doc["seed"] = r.seed ? ojson(*r.seed) : ojson(nullptr);
  doc["expect_fail"] = r.expect_fail;
  doc["status"] = to_string(r.status);
  if (!r.error.empty()) doc["error"] = r.error;
  ojson asserts = ojson::array();
  for (const auto& a : r.assertions) asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  doc["assertions"] = std::move(asserts);
  doc["result"] = r.payload;
  // nlohmann writes NaN and infinities as null.
  return doc.dump(2) + "\n";
}

namespace {

std::string number(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", *v);
  return buf;
}

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string summary_csv(const std::vector<ScenarioResult>& results) {
  std::string out = std::string(kSummaryHeader) + "\n";
  for (const auto& r : results) {
    const auto& s = r.summary;
    out += field(r.name) + "," + std::string(to_string(r.kind)) + "," + std::string(to_string(r.status)) + ",";
    out += (s.d ? std::to_string(*s.d) : "") + "," + field(s.shape) + ",";
    out += number(s.lambda) + "," + number(s.epsilon) + "," + number(s.ground_energy) + ",";
    out += (s.negative_count ? std::to_string(*s.negative_count) : "") + ",";
    out += number(s.fitted_s) + "," + field(s.classification) + "\n";
  }
  return out;
}

}  // namespace vlab::report
