#include "mfvolterra/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "mfvolterra/errors.hpp"
#include "mfvolterra/verify.hpp"

namespace mfv {

namespace {

using nlohmann::json;

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

double param(const json& params, const char* key) {
  if (!params.contains(key)) {
    throw ConfigError(std::string("hurst.params.") + key + " is required for this shape");
  }
  if (!params.at(key).is_number()) {
    throw ConfigError(std::string("hurst.params.") + key + " must be a number");
  }
  return params.at(key).get<double>();
}

}  // namespace

HurstFunction hurst_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("shape")) {
    throw ConfigError("hurst: expected an object with a 'shape' field");
  }
  const std::string shape = spec.at("shape").get<std::string>();
  const json params = spec.value("params", json::object());
  std::optional<std::pair<double, double>> bounds;
  if (spec.contains("bounds")) {
    const json& b = spec.at("bounds");
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
      throw ConfigError("hurst.bounds must be [a, b]");
    }
    bounds = std::pair{b[0].get<double>(), b[1].get<double>()};
    if (!(bounds->first > 0.5 && bounds->first <= bounds->second && bounds->second < 1.0)) {
      throw ConfigError("hurst.bounds: need 1/2 < a <= b < 1, i.e. values in (1/2,1)");
    }
  }
  try {
    if (shape == "constant") {
      const double v = param(params, "value");
      if (bounds && (v < bounds->first || v > bounds->second)) {
        throw ConfigError("hurst: constant value outside the declared bounds");
      }
      return HurstFunction::constant(v);
    }
    if (shape == "affine_clamped") {
      if (!bounds) throw ConfigError("hurst: affine_clamped needs bounds [a, b]");
      return HurstFunction::affine_clamped(param(params, "h0"), param(params, "slope"),
                                           bounds->first, bounds->second);
    }
    if (shape == "sinusoidal") {
      const double mean = param(params, "mean"), amp = param(params, "amplitude");
      const double omega = param(params, "omega");
      const double phase = params.contains("phase") ? param(params, "phase") : 0.0;
      if (bounds) {
        return HurstFunction::sinusoidal(mean, amp, omega, phase, bounds->first, bounds->second);
      }
      return HurstFunction::sinusoidal(mean, amp, omega, phase);
    }
    if (shape == "table") {
      if (!params.contains("times") || !params.contains("values")) {
        throw ConfigError("hurst: table needs params.times and params.values");
      }
      auto h = HurstFunction::table(params.at("times").get<std::vector<double>>(),
                                    params.at("values").get<std::vector<double>>(),
                                    params.value("differentiable", true));
      if (bounds && (h.lower() < bounds->first || h.upper() > bounds->second)) {
        throw ConfigError("hurst: table values outside the declared bounds");
      }
      return h;
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("hurst: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("hurst: ") + e.what());
  }
  throw ConfigError("hurst.shape must be one of constant, affine_clamped, sinusoidal, table; got '" +
                    shape + "'");
}

HurstFunction CampaignConfig::hurst() const { return hurst_from_json(hurst_spec); }

CampaignConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "hurst",  "horizon",     "grid_size", "n_paths",    "n_sub",         "seed",
      "quadrature", "output_dir", "suites", "method",     "covariance_method", "levels",
      "epsilon", "ensemble_file", "bin_width", "checkpoints", "path_index", "convention"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
  }
  CampaignConfig c;
  if (!j.contains("hurst")) throw ConfigError("config field 'hurst' is required");
  c.hurst_spec = j.at("hurst");
  c.hurst();  // validates

  c.horizon = field(j, "horizon", c.horizon);
  if (!(c.horizon > 0.0)) throw ConfigError("horizon must be > 0");
  c.grid_size = field(j, "grid_size", c.grid_size);
  if (c.grid_size < 2) throw ConfigError("grid_size must be >= 2");
  c.n_paths = field(j, "n_paths", c.n_paths);
  if (c.n_paths < 1) throw ConfigError("n_paths must be >= 1");
  c.n_sub = field(j, "n_sub", c.n_sub);
  if (c.n_sub < c.grid_size) throw ConfigError("n_sub must be >= grid_size");
  c.seed = field<std::uint64_t>(j, "seed", c.seed);

  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    c.quadrature.abs_tol = field(q, "abs_tol", c.quadrature.abs_tol);
    c.quadrature.rel_tol = field(q, "rel_tol", c.quadrature.rel_tol);
    c.quadrature.max_subdivisions = field(q, "max_subdivisions", c.quadrature.max_subdivisions);
    try {
      c.quadrature.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  c.output_dir = field(j, "output_dir", c.output_dir);
  if (j.contains("suites")) {
    const json& s = j.at("suites");
    c.suites = s.is_string() ? std::vector<std::string>{s.get<std::string>()}
                             : field(j, "suites", c.suites);
    const auto known = suite_names();
    for (const auto& name : c.suites) {
      if (name != "all" && std::find(known.begin(), known.end(), name) == known.end()) {
        throw ConfigError("suites: unknown suite '" + name + "'");
      }
    }
  }
  c.method = field(j, "method", c.method);
  if (c.method != "cholesky" && c.method != "volterra") {
    throw ConfigError("method must be 'cholesky' or 'volterra'");
  }
  if (j.contains("covariance_method")) {
    c.covariance_method = covariance_method_from_string(field<std::string>(j, "covariance_method", ""));
    if (c.covariance_method == CovarianceMethod::Empirical) {
      throw ConfigError("covariance_method 'empirical' cannot drive a sampler");
    }
    if (c.covariance_method == CovarianceMethod::FbmClosedForm && !c.hurst().is_constant()) {
      throw ConfigError("covariance_method 'fbm_closed_form' needs a constant hurst shape");
    }
  }
  c.levels = field(j, "levels", c.levels);
  c.epsilon = field(j, "epsilon", c.epsilon);
  for (double e : c.epsilon) {
    if (!(e > 0.0)) throw ConfigError("epsilon values must be > 0");
  }
  if (j.contains("ensemble_file") && !j.at("ensemble_file").is_null()) {
    c.ensemble_file = field<std::string>(j, "ensemble_file", "");
  }
  if (j.contains("bin_width") && !j.at("bin_width").is_null()) {
    c.bin_width = field<double>(j, "bin_width", 0.0);
    if (!(*c.bin_width > 0.0)) throw ConfigError("bin_width must be > 0");
  }
  c.checkpoints = field(j, "checkpoints", c.checkpoints);
  if (c.checkpoints < 1) throw ConfigError("checkpoints must be >= 1");
  c.path_index = field(j, "path_index", c.path_index);
  if (c.path_index < 0) throw ConfigError("path_index must be >= 0");
  if (j.contains("convention")) {
    c.convention = variance_convention_from_string(field<std::string>(j, "convention", ""));
  }
  return c;
}

CampaignConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

nlohmann::json CampaignConfig::to_json() const {
  json j;
  j["hurst"] = hurst_spec;
  j["horizon"] = horizon;
  j["grid_size"] = grid_size;
  j["n_paths"] = n_paths;
  j["n_sub"] = n_sub;
  j["seed"] = seed;
  j["quadrature"] = {{"abs_tol", quadrature.abs_tol},
                     {"rel_tol", quadrature.rel_tol},
                     {"max_subdivisions", quadrature.max_subdivisions}};
  j["output_dir"] = output_dir;
  j["suites"] = suites;
  j["method"] = method;
  j["covariance_method"] = to_string(covariance_method);
  j["levels"] = levels;
  j["epsilon"] = epsilon;
  j["ensemble_file"] = ensemble_file ? json(*ensemble_file) : json(nullptr);
  j["bin_width"] = bin_width ? json(*bin_width) : json(nullptr);
  j["checkpoints"] = checkpoints;
  j["path_index"] = path_index;
  j["convention"] = to_string(convention);
  return j;
}

}  // namespace mfv
