#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mfvolterra/covariance.hpp"
#include "mfvolterra/hurst.hpp"
#include "mfvolterra/quadrature.hpp"
#include "mfvolterra/tanaka.hpp"

namespace mfv {

/// Campaign configuration (JSON). Field reference in README.md.
struct CampaignConfig {
  nlohmann::json hurst_spec;  ///< {"shape", "params", "bounds"}
  double horizon = 1.0;
  int grid_size = 64;
  int n_paths = 1000;
  int n_sub = 2048;
  std::uint64_t seed = 20240601;
  QuadratureSpec quadrature;
  std::string output_dir = "mfvolterra_out";
  std::vector<std::string> suites{"all"};
  std::string method = "cholesky";  ///< sampler: cholesky | volterra
  CovarianceMethod covariance_method = CovarianceMethod::GramNodes;
  std::vector<double> levels{-0.2, 0.0, 0.1};
  std::vector<double> epsilon{1e-2, 1e-3};
  std::optional<std::string> ensemble_file;
  std::optional<double> bin_width;  ///< local time bins; Freedman-Diaconis when absent
  int checkpoints = 5;
  int path_index = 0;
  VarianceConvention convention = VarianceConvention::Normalized;

  HurstFunction hurst() const;
  nlohmann::json to_json() const;
};

/// Parses and validates; throws ConfigError naming the failing field.
CampaignConfig parse_config(const nlohmann::json& j);
CampaignConfig load_config(const std::string& path);

/// Builds a Hurst function from {"shape", "params", "bounds"}.
HurstFunction hurst_from_json(const nlohmann::json& spec);

}  // namespace mfv
