#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fplab::lab {

// Raised on unreadable, malformed, or incomplete configs; mapped to the
// usage exit code by the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key = value experiment description. Unset numeric fields are zero and
// filled in per experiment by resolve_defaults(); the seed has no default on
// purpose, runs must be reproducible.
struct LabConfig {
  std::string experiment_id;
  std::string family;    // bernoulli_product | gaussian_mean | gaussian_covariance
  std::string mech_id;   // constant | plugin | dp_gauss_cov | dp_gauss_mean
  int d = 0;
  int n = 0;
  double eps = 0.0;
  double delta = 0.0;
  double clip = 0.0;
  double alpha = 0.0;
  double t_thresh = 0.0;  // 0 means "use the per-instance recipe"
  std::int64_t outer_trials = 0;
  std::int64_t inner_trials = 0;
  std::int64_t mc_samples = 0;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  bool has_seed = false;
  bool has_delta = false;  // distinguishes an explicit delta = 0 from "unset"
  int workers = 0;  // 0 = hardware default
  std::string out_dir;
};

// Parses `key = value` lines; '#' starts a comment. Unknown or duplicate
// keys are errors.
LabConfig parse_config_text(const std::string& text);
LabConfig parse_config_file(const std::string& path);

// Fills experiment-specific defaults and validates; throws ConfigError.
void resolve_defaults(LabConfig& cfg);

}  // namespace fplab::lab
