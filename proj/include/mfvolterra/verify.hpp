#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "mfvolterra/config.hpp"

namespace mfv {

/// One named check. `relation` says how value is compared with tolerance:
/// "<=" (value at most tolerance) or ">=" (value at least tolerance).
struct CheckResult {
  std::string suite;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";
  bool pass = false;
  bool skipped = false;  ///< precondition of the check not met by the config; not a failure
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckResult> checks;
  double phi_constant = 0.0;
  double elapsed_seconds = 0.0;

  bool pass() const;
  std::size_t failed() const;
  nlohmann::json to_json(const CampaignConfig& config) const;
};

/// Suites in run order; "all" runs each of them.
const std::vector<std::string>& suite_names();

/// Runs one suite (or "all"). Monte Carlo checks with fewer than 100 paths fail with an
/// "insufficient sample" detail. Numerical failures propagate as exceptions.
VerifyReport run_verify(const CampaignConfig& config, const std::string& suite);

}  // namespace mfv
