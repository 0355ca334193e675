#include "fplab/lab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fplab::lab {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_trials_csv(const TrialTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // fixed newline convention
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "trial_index";
  for (const auto& c : table.columns) out << "," << c;
  out << "\n";
  const std::size_t rows = table.row_count();
  for (const auto& col : table.values) {
    if (col.size() != rows) throw std::logic_error("trial table columns have unequal length");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    out << r;
    for (const auto& col : table.values) out << "," << fmt17(col[r]);
    out << "\n";
  }
}

std::string format_summary_json(const Report& report) {
  nlohmann::ordered_json j;
  j["artifact"] = {{"name", kArtifactName}, {"version", report.version}};
  j["experiment"] = report.experiment_id;
  j["all_pass"] = report.all_pass();
  j["runtime_seconds"] = report.runtime_seconds;

  const LabConfig& c = report.config;
  nlohmann::ordered_json cfg;
  cfg["experiment"] = c.experiment_id;
  if (!c.family.empty()) cfg["family"] = c.family;
  if (!c.mech_id.empty()) cfg["mech"] = c.mech_id;
  cfg["d"] = c.d;
  cfg["n"] = c.n;
  cfg["eps"] = c.eps;
  cfg["delta"] = c.delta;
  cfg["clip"] = c.clip;
  cfg["alpha"] = c.alpha;
  cfg["t_thresh"] = c.t_thresh;
  cfg["outer_trials"] = c.outer_trials;
  cfg["inner_trials"] = c.inner_trials;
  cfg["mc_samples"] = c.mc_samples;
  cfg["reps"] = c.reps;
  cfg["seed"] = c.seed;
  cfg["workers"] = c.workers;
  cfg["out"] = c.out_dir;
  j["config"] = cfg;

  nlohmann::ordered_json metrics = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json m;
    m["name"] = r.name;
    m["estimate"] = r.estimate;
    m["stderr"] = r.se;
    m["target"] = r.target;
    m["comparator"] = r.comparator;
    m["pass"] = r.pass;
    m["target_kind"] = r.target_kind;
    m["detail"] = r.detail;
    metrics.push_back(std::move(m));
  }
  j["metrics"] = std::move(metrics);
  return j.dump(2) + "\n";
}

void write_summary_json(const Report& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << format_summary_json(report);
}

MetricRow row_report(std::string name, double estimate, double se, std::string detail) {
  MetricRow r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.se = se;
  r.target = std::nan("");
  r.comparator = "report";
  r.pass = true;
  r.target_kind = "report";
  r.detail = std::move(detail);
  return r;
}

MetricRow row_exact(std::string name, double estimate, double target, double tol,
                    std::string detail) {
  MetricRow r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.target = target;
  r.comparator = "|estimate - target| <= " + std::to_string(tol);
  r.pass = std::abs(estimate - target) <= tol;
  r.target_kind = "exact";
  r.detail = std::move(detail);
  return r;
}

MetricRow row_mc(std::string name, double estimate, double se, double target, double se_multiple,
                 std::string detail) {
  MetricRow r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.se = se;
  r.target = target;
  r.comparator = "|estimate - target| <= " + std::to_string(se_multiple) + " SE";
  r.pass = std::abs(estimate - target) <= se_multiple * se;
  r.target_kind = "mc_se";
  r.detail = std::move(detail);
  return r;
}

MetricRow row_lower_bound(std::string name, double estimate, double se, double bound,
                          double slack_se, std::string detail) {
  MetricRow r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.se = se;
  r.target = bound;
  r.comparator = "estimate >= target - " + std::to_string(slack_se) + " SE";
  r.pass = estimate >= bound - slack_se * se;
  r.target_kind = "bound";
  r.detail = std::move(detail);
  return r;
}

MetricRow row_upper_bound(std::string name, double estimate, double se, double bound,
                          double slack_se, std::string detail) {
  MetricRow r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.se = se;
  r.target = bound;
  r.comparator = "estimate <= target + " + std::to_string(slack_se) + " SE";
  r.pass = estimate <= bound + slack_se * se;
  r.target_kind = "bound";
  r.detail = std::move(detail);
  return r;
}

}  // namespace fplab::lab
