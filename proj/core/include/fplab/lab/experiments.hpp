#pragma once

#include "fplab/lab/config.hpp"
#include "fplab/lab/report.hpp"

namespace fplab::lab {

// Runs the named experiment on a defaults-resolved copy of cfg. Per-trial
// values land in *trials when non-null. Throws ConfigError on bad configs;
// statistical failures are reported through the rows, not exceptions.
Report run_experiment(const LabConfig& cfg, TrialTable* trials);

}  // namespace fplab::lab
