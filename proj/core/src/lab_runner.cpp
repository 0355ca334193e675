#include "fplab/lab/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fplab/lab/experiments.hpp"

namespace fplab::lab {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Trim trailing zeros for directory names; keeps sweeps readable.
std::string axis_value_label(double v) {
  std::ostringstream os;
  os << v;
  std::string s = os.str();
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

}  // namespace

RunOutcome run_to_files(const LabConfig& cfg) {
  TrialTable trials;
  RunOutcome out;
  out.report = run_experiment(cfg, &trials);

  const std::filesystem::path dir(out.report.config.out_dir);
  std::filesystem::create_directories(dir);
  out.summary_path = (dir / "summary.json").string();
  out.trials_path = (dir / "trials.csv").string();
  write_summary_json(out.report, out.summary_path);
  write_trials_csv(trials, out.trials_path);
  out.exit_code = out.report.all_pass() ? kExitPass : kExitStatFailure;
  return out;
}

void set_numeric_field(LabConfig& cfg, const std::string& axis, double value) {
  const auto as_int = [&](const char* what) {
    if (value < 0 || std::floor(value) != value) {
      throw ConfigError(std::string("sweep: ") + what + " requires a non-negative integer value");
    }
    return static_cast<std::int64_t>(value);
  };
  if (axis == "d") cfg.d = static_cast<int>(as_int("d"));
  else if (axis == "n") cfg.n = static_cast<int>(as_int("n"));
  else if (axis == "eps") cfg.eps = value;
  else if (axis == "delta") cfg.delta = value;
  else if (axis == "clip") cfg.clip = value;
  else if (axis == "alpha") cfg.alpha = value;
  else if (axis == "t_thresh") cfg.t_thresh = value;
  else if (axis == "outer_trials") cfg.outer_trials = as_int("outer_trials");
  else if (axis == "inner_trials") cfg.inner_trials = as_int("inner_trials");
  else if (axis == "mc_samples") cfg.mc_samples = as_int("mc_samples");
  else if (axis == "reps") cfg.reps = as_int("reps");
  else if (axis == "workers") cfg.workers = static_cast<int>(as_int("workers"));
  else if (axis == "seed") {
    cfg.seed = static_cast<std::uint64_t>(as_int("seed"));
    cfg.has_seed = true;
  } else {
    throw ConfigError("sweep: '" + axis + "' is not a numeric config field");
  }
}

SweepOutcome run_sweep(const LabConfig& base, const std::string& axis,
                       const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep: empty value list");

  SweepOutcome out;
  const std::filesystem::path root(base.out_dir.empty() ? std::string("out/sweep")
                                                        : base.out_dir);
  for (const double v : values) {
    LabConfig cfg = base;
    set_numeric_field(cfg, axis, v);
    cfg.out_dir = (root / (axis + "_" + axis_value_label(v))).string();
    out.runs.push_back(run_to_files(cfg));
    if (out.runs.back().exit_code != kExitPass) out.exit_code = kExitStatFailure;
  }

  std::filesystem::create_directories(root);
  out.combined_csv_path = (root / "sweep.csv").string();
  std::ofstream csv(out.combined_csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + out.combined_csv_path);
  csv << axis << ",metric,estimate,stderr,target,pass\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (const auto& row : out.runs[i].report.rows) {
      csv << fmt17(values[i]) << "," << row.name << "," << fmt17(row.estimate) << ","
          << fmt17(row.se) << "," << fmt17(row.target) << "," << (row.pass ? 1 : 0) << "\n";
    }
  }
  return out;
}

}  // namespace fplab::lab
