#pragma once

#include <string>
#include <vector>

#include "fplab/lab/config.hpp"

namespace fplab::lab {

inline constexpr const char* kArtifactName = "fplab";
inline constexpr const char* kArtifactVersion = "0.1.0";

// One checked quantity. `comparator` spells out the acceptance rule that
// `pass` reflects; `target_kind` records how the target was obtained
// (exact arithmetic, closed form, a Monte Carlo tolerance, an upper bound,
// or a report-only row).
struct MetricRow {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double target = 0.0;
  std::string comparator;
  bool pass = true;
  std::string target_kind;
  std::string detail;  // the identity or bound this row checks
};

struct Report {
  std::string experiment_id;
  LabConfig config;  // defaults resolved
  std::vector<MetricRow> rows;
  double runtime_seconds = 0.0;
  std::string version = kArtifactVersion;

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

// Per-trial values, one named column each; the writer prepends trial_index.
struct TrialTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // values[c] is column c

  std::size_t row_count() const { return columns.empty() ? 0 : values.front().size(); }
};

// Floats serialized with 17 significant digits so reruns are byte-comparable.
void write_trials_csv(const TrialTable& table, const std::string& path);
void write_summary_json(const Report& report, const std::string& path);
std::string format_summary_json(const Report& report);

// Convenience row builders. MC rows pass when |estimate - target| is within
// se_multiple standard errors; bound rows allow slack standard errors on the
// estimate side.
MetricRow row_report(std::string name, double estimate, double se, std::string detail);
MetricRow row_exact(std::string name, double estimate, double target, double tol, std::string detail);
MetricRow row_mc(std::string name, double estimate, double se, double target, double se_multiple,
                 std::string detail);
MetricRow row_lower_bound(std::string name, double estimate, double se, double bound,
                          double slack_se, std::string detail);
MetricRow row_upper_bound(std::string name, double estimate, double se, double bound,
                          double slack_se, std::string detail);

}  // namespace fplab::lab
