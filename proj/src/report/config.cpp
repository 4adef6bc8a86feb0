#include "vlab/report/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vlab/errors.hpp"

namespace vlab::report {

using nlohmann::json;

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::geometry_identities: return "geometry_identities";
    case Kind::cone_separation: return "cone_separation";
    case Kind::ims_verify: return "ims_verify";
    case Kind::fermion_hardy: return "fermion_hardy";
    case Kind::virtual_level: return "virtual_level";
    case Kind::decay_fit: return "decay_fit";
    case Kind::efimov_count: return "efimov_count";
  }
  return "unknown";
}

std::optional<Kind> parse_kind(std::string_view name) {
  for (auto k : {Kind::geometry_identities, Kind::cone_separation, Kind::ims_verify, Kind::fermion_hardy,
                 Kind::virtual_level, Kind::decay_fit, Kind::efimov_count})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

bool needs_seed(Kind k) {
  return k == Kind::geometry_identities || k == Kind::cone_separation || k == Kind::ims_verify;
}

namespace {

std::string type_name(const json& j) { return j.type_name(); }

// Strict reader for one JSON object: every key must be consumed.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object, found " + type_name(obj_));
  }

  bool has(const char* key) const { return obj_.contains(key); }

  template <class T>
  T get(const char* key, T fallback) {
    if (!obj_.contains(key)) return fallback;
    return require<T>(key);
  }

  template <class T>
  std::optional<T> optional(const char* key) {
    if (!obj_.contains(key)) return std::nullopt;
    return require<T>(key);
  }

  template <class T>
  T require(const char* key) {
    used_.insert(key);
    if (!obj_.contains(key)) throw ConfigError(path_ + ": missing key '" + key + "'");
    const json& v = obj_.at(key);
    if (!has_type<T>(v)) throw ConfigError(path_ + "." + key + ": expected " + expected<T>() + ", found " + v.dump());
    return v.get<T>();
  }

  const json& raw(const char* key) {
    used_.insert(key);
    if (!obj_.contains(key)) throw ConfigError(path_ + ": missing key '" + key + "'");
    return obj_.at(key);
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
  }

 private:
  // nlohmann converts silently between numbers and booleans; be stricter.
  template <class T>
  static bool has_type(const json& v) {
    if constexpr (std::is_same_v<T, bool>) {
      return v.is_boolean();
    } else if constexpr (std::is_integral_v<T>) {
      return std::is_unsigned_v<T> ? v.is_number_unsigned() : v.is_number_integer();
    } else if constexpr (std::is_floating_point_v<T>) {
      return v.is_number();
    } else if constexpr (std::is_same_v<T, std::string>) {
      return v.is_string();
    } else {
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!has_type<typename T::value_type>(e)) return false;
      return true;
    }
  }

  template <class T>
  static std::string expected() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_integral_v<T>) return std::is_unsigned_v<T> ? "a non-negative integer" : "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else {
      const std::string inner = expected<typename T::value_type>();
      return "an array of " + inner.substr(inner.find(' ') + 1) + "s";
    }
  }

  const json& obj_;
  std::string path_;
  std::set<std::string, std::less<>> used_;
};

template <class F>
auto checked(const std::string& path, F f) {
  try {
    return f();
  } catch (const ArgumentError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

spectral::PotentialSpec read_potential(const json& j, const std::string& path) {
  Fields f(j, path);
  const auto name = f.require<std::string>("shape");
  spectral::PotentialSpec p;
  checked(path, [&] {
    p.shape = spectral::parse_shape(name);
    return 0;
  });
  switch (p.shape) {
    case spectral::Shape::square_well:
      p.depth = f.get("depth", 1.0);
      p.radius = f.get("radius", 1.0);
      break;
    case spectral::Shape::gaussian:
      p.depth = f.get("depth", 1.0);
      p.width = f.get("width", 1.0);
      break;
    case spectral::Shape::inverse_square_tail:
      p.beta1 = f.require<double>("beta1");
      p.inner_radius = f.get("inner_radius", 1.0);
      break;
    case spectral::Shape::inverse_power_tail:
      p.beta1 = f.require<double>("beta1");
      p.beta2 = f.require<double>("beta2");
      p.inner_radius = f.get("inner_radius", 1.0);
      break;
  }
  f.finish();
  checked(path, [&] {
    p.validate();
    return 0;
  });
  return p;
}

spectral::Grid read_grid(Fields& f, spectral::Grid g) {
  g.r_max = f.get("r_max", g.r_max);
  g.points = f.get("points", g.points);
  return g;
}

hardy::Classification read_classification(const std::string& s, const std::string& path) {
  for (auto c : {hardy::Classification::eigenvalue, hardy::Classification::resonance, hardy::Classification::marginal})
    if (hardy::to_string(c) == s) return c;
  throw ConfigError(path + ": unknown classification '" + s + "'");
}

Parameters read_parameters(Kind kind, const json& j, const std::string& path) {
  Fields f(j, path);
  switch (kind) {
    case Kind::geometry_identities: {
      GeometryIdentitiesParams p;
      p.particles = f.get("particles", p.particles);
      p.dims = f.get("dims", p.dims);
      p.draws = f.get("draws", p.draws);
      p.mass_lo = f.get("mass_lo", p.mass_lo);
      p.mass_hi = f.get("mass_hi", p.mass_hi);
      p.tolerance = f.get("tolerance", p.tolerance);
      f.finish();
      return p;
    }
    case Kind::cone_separation: {
      ConeSeparationParams p;
      p.masses = f.require<std::vector<double>>("masses");
      p.dim = f.get("dim", p.dim);
      p.l_max = f.get("l_max", p.l_max);
      p.kappa1 = f.get("kappa1", p.kappa1);
      p.kappa1_prime = f.get("kappa1_prime", p.kappa1_prime);
      p.samples = f.get("samples", p.samples);
      p.separation = f.get("separation", p.separation);
      p.lower_bound = f.get("lower_bound", p.lower_bound);
      p.lower_bound_samples = f.get("lower_bound_samples", p.lower_bound_samples);
      if (f.has("corrupt")) {
        Fields c(f.raw("corrupt"), f.path("corrupt"));
        p.corrupt = CorruptLadder{c.get("factor", 100.0)};
        c.finish();
      }
      f.finish();
      return p;
    }
    case Kind::ims_verify: {
      ImsVerifyParams p;
      p.epsilons = f.get("epsilons", p.epsilons);
      p.b = f.get("b", p.b);
      p.d = f.get("d", p.d);
      p.radial_grid = f.get("radial_grid", p.radial_grid);
      p.gaussian_widths = f.get("gaussian_widths", p.gaussian_widths);
      p.masses = f.get("masses", p.masses);
      p.dim = f.get("dim", p.dim);
      p.partition = f.get("partition", p.partition);
      p.kappa = f.get("kappa", p.kappa);
      p.cone_samples = f.get("cone_samples", p.cone_samples);
      p.consistency_samples = f.get("consistency_samples", p.consistency_samples);
      p.bound_tolerance = f.get("bound_tolerance", p.bound_tolerance);
      p.unity_tolerance = f.get("unity_tolerance", p.unity_tolerance);
      p.derivative_tolerance = f.get("derivative_tolerance", p.derivative_tolerance);
      p.corrupt = f.get("corrupt", p.corrupt);
      f.finish();
      return p;
    }
    case Kind::fermion_hardy: {
      FermionHardyParams p;
      p.rho0 = f.get("rho0", p.rho0);
      p.rho1 = f.get("rho1", p.rho1);
      p.points = f.get("points", p.points);
      p.modes = f.get("modes", p.modes);
      const auto b = f.get<std::string>("boundary", "free");
      if (b == "dirichlet")
        p.boundary = hardy::RadialBoundary::dirichlet;
      else if (b != "free")
        throw ConfigError(f.path("boundary") + ": expected \"free\" or \"dirichlet\"");
      p.expected = f.get("expected", p.expected);
      p.rel_tol = f.get("rel_tol", p.rel_tol);
      f.finish();
      return p;
    }
    case Kind::virtual_level: {
      VirtualLevelParams p;
      p.d = f.get("d", p.d);
      p.l = f.get("l", p.l);
      p.potential = read_potential(f.raw("potential"), f.path("potential"));
      p.grid = read_grid(f, p.grid);
      p.oracle_lambda = f.optional<double>("oracle_lambda");
      p.rel_tol = f.get("rel_tol", p.rel_tol);
      p.energy_tol = f.get("energy_tol", p.energy_tol);
      p.sweep_n_max = f.get("sweep_n_max", p.sweep_n_max);
      f.finish();
      return p;
    }
    case Kind::decay_fit: {
      DecayFitParams p;
      p.d = f.get("d", p.d);
      p.l = f.get("l", p.l);
      p.potential = read_potential(f.raw("potential"), f.path("potential"));
      p.grid = read_grid(f, p.grid);
      p.match_radius = f.get("match_radius", p.match_radius);
      if (f.has("window")) {
        const auto w = f.require<std::vector<double>>("window");
        if (w.size() != 2) throw ConfigError(f.path("window") + ": expected [r_lo, r_hi]");
        p.r_lo = w[0];
        p.r_hi = w[1];
      }
      p.samples_per_decade = f.get("samples_per_decade", p.samples_per_decade);
      p.marginal_tol = f.get("marginal_tol", p.marginal_tol);
      p.expected_s = f.optional<double>("expected_s");
      p.s_tol = f.get("s_tol", p.s_tol);
      if (auto c = f.optional<std::string>("expected_classification"))
        p.expected_classification = read_classification(*c, f.path("expected_classification"));
      f.finish();
      return p;
    }
    case Kind::efimov_count: {
      EfimovCountParams p;
      p.c = f.optional<double>("c");
      if (f.has("log_r") && f.has("r")) throw ConfigError(path + ": give either 'r' or 'log_r', not both");
      if (f.has("r")) {
        for (double r : f.require<std::vector<double>>("r")) {
          if (!(r > 1.0)) throw ConfigError(f.path("r") + ": every R must exceed 1");
          p.log_r.push_back(std::log(r));
        }
      }
      p.log_r = f.get("log_r", p.log_r);
      p.step = f.get("step", p.step);
      const auto e = f.get<std::string>("expect", "none");
      if (e == "saturate")
        p.expect = EfimovCountParams::Expect::saturate;
      else if (e == "grow")
        p.expect = EfimovCountParams::Expect::grow;
      else if (e != "none")
        throw ConfigError(f.path("expect") + ": expected \"none\", \"saturate\" or \"grow\"");
      p.slope_rel_tol = f.get("slope_rel_tol", p.slope_rel_tol);
      if (f.has("threshold")) {
        Fields t(f.raw("threshold"), f.path("threshold"));
        ThresholdParams tp;
        tp.c_lo = t.get("c_lo", tp.c_lo);
        tp.c_hi = t.get("c_hi", tp.c_hi);
        tp.log_r1 = t.get("log_r1", tp.log_r1);
        tp.log_r2 = t.get("log_r2", tp.log_r2);
        tp.tol = t.get("tol", tp.tol);
        t.finish();
        p.threshold = tp;
      }
      if (p.c && p.log_r.empty()) throw ConfigError(path + ": 'c' needs a list of radii");
      if (!p.c && !p.threshold) throw ConfigError(path + ": nothing to run (give 'c' or 'threshold')");
      f.finish();
      return p;
    }
  }
  throw ConfigError(path + ": unhandled kind");
}

// 1-based line and column of a byte offset.
std::pair<int, int> locate(std::string_view text, std::size_t offset) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Config parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based position of the offending character.
    const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << "syntax error at line " << line << ", column " << col;
    throw ConfigError(os.str(), line, col);
  }

  Fields top(doc, "$");
  Config cfg;
  cfg.version = top.require<int>("version");
  if (cfg.version != 1) throw ConfigError("$.version: unsupported version " + std::to_string(cfg.version));
  const json& list = top.raw("scenarios");
  if (!list.is_array()) throw ConfigError("$.scenarios: expected an array");
  top.finish();

  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "$.scenarios[" + std::to_string(i) + "]";
    Fields f(list[i], path);
    Scenario s;
    s.name = f.require<std::string>("name");
    if (s.name.empty()) throw ConfigError(path + ".name: must not be empty");
    if (auto [it, fresh] = seen.emplace(s.name, i); !fresh)
      throw ConfigError("duplicate scenario name '" + s.name + "' at $.scenarios[" + std::to_string(it->second) +
                        "] and " + path);
    const auto kind_name = f.require<std::string>("kind");
    const auto kind = parse_kind(kind_name);
    if (!kind) throw ConfigError(path + ".kind: unknown kind '" + kind_name + "'");
    s.kind = *kind;
    const json& params = f.has("parameters") ? f.raw("parameters") : json::object();
    s.parameters = read_parameters(s.kind, params, path + ".parameters");
    s.parameter_text = params.dump();
    s.seed = f.optional<std::uint64_t>("seed");
    if (!s.seed && needs_seed(s.kind)) throw ConfigError(path + ": kind " + kind_name + " needs a seed");
    s.output = f.get<std::string>("output", s.name);
    if (s.output.empty() || s.output.find('/') != std::string::npos || s.output.find('\\') != std::string::npos ||
        s.output == "." || s.output == ".." || s.output == "summary")
      throw ConfigError(path + ".output: must be a plain file prefix");
    s.expect_fail = f.get("expect_fail", false);
    f.finish();
    cfg.scenarios.push_back(std::move(s));
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void override_seeds(Config& config, std::uint64_t seed) {
  for (auto& s : config.scenarios) s.seed = seed;
}

std::string parameter_digest(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s.parameter_text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vlab::report
