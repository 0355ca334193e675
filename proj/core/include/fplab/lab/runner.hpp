#pragma once

#include <string>
#include <vector>

#include "fplab/lab/config.hpp"
#include "fplab/lab/report.hpp"

namespace fplab::lab {

// Exit-code contract shared with the CLI: 0 all checks pass, 1 a statistical
// check failed, 2 usage or config error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitStatFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunOutcome {
  Report report;
  int exit_code = kExitPass;
  std::string summary_path;
  std::string trials_path;
};

// Runs the experiment and writes summary.json and trials.csv under
// cfg.out_dir (created if needed). Nothing is written when the run throws.
RunOutcome run_to_files(const LabConfig& cfg);

struct SweepOutcome {
  std::vector<RunOutcome> runs;
  int exit_code = kExitPass;
  std::string combined_csv_path;
};

// One run per value of the named numeric field, each in its own
// subdirectory, plus a combined long-format CSV for plotting.
SweepOutcome run_sweep(const LabConfig& base, const std::string& axis,
                       const std::vector<double>& values);

// Assigns a numeric config field by name; throws ConfigError for fields that
// are not numeric or unknown.
void set_numeric_field(LabConfig& cfg, const std::string& axis, double value);

}  // namespace fplab::lab
