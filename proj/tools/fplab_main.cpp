// fplab: seeded experiment runner for the fingerprinting verification lab.
//
//   fplab run <config> [--seed S] [--out DIR] [--workers W]
//   fplab sweep <config> --axis NAME --values v1,v2,... [--seed S] [--out DIR]
//
// Exit codes: 0 all checks pass, 1 statistical failure, 2 usage/config error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fplab/lab/config.hpp"
#include "fplab/lab/runner.hpp"

namespace {

using fplab::lab::LabConfig;

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  int workers = -1;
};

LabConfig load_config(const CommonOpts& opts) {
  LabConfig cfg = fplab::lab::parse_config_file(opts.config_path);
  if (opts.seed_set) {
    cfg.seed = opts.seed;
    cfg.has_seed = true;
  }
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.workers >= 0) cfg.workers = opts.workers;
  return cfg;
}

void print_report(const fplab::lab::Report& rep) {
  std::printf("experiment %s (seed %llu)\n", rep.experiment_id.c_str(),
              static_cast<unsigned long long>(rep.config.seed));
  for (const auto& row : rep.rows) {
    std::printf("  [%s] %-38s estimate=%.6g", row.pass ? "PASS" : "FAIL", row.name.c_str(),
                row.estimate);
    if (row.se > 0.0) std::printf(" (se %.2g)", row.se);
    if (row.comparator != "report") std::printf(" target=%.6g [%s]", row.target, row.comparator.c_str());
    std::printf("\n");
  }
  std::printf("runtime %.2fs, %s\n", rep.runtime_seconds, rep.all_pass() ? "all pass" : "FAILURES");
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw fplab::lab::ConfigError("sweep: bad value '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw fplab::lab::ConfigError("sweep: empty value list");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fingerprinting lower-bound verification lab"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts;
  std::string axis, values_csv;

  auto* run_cmd = app.add_subcommand("run", "run one experiment config");
  run_cmd->add_option("config", run_opts.config_path, "config file")->required();
  auto* run_seed = run_cmd->add_option("--seed", run_opts.seed, "master seed override");
  run_cmd->add_option("--out", run_opts.out_dir, "output directory override");
  run_cmd->add_option("--workers", run_opts.workers, "worker thread count (0 = hardware)");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a config across an axis of values");
  sweep_cmd->add_option("config", sweep_opts.config_path, "config file")->required();
  sweep_cmd->add_option("--axis", axis, "numeric config field to vary")->required();
  sweep_cmd->add_option("--values", values_csv, "comma-separated values")->required();
  auto* sweep_seed = sweep_cmd->add_option("--seed", sweep_opts.seed, "master seed override");
  sweep_cmd->add_option("--out", sweep_opts.out_dir, "output directory override");
  sweep_cmd->add_option("--workers", sweep_opts.workers, "worker thread count (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fplab::lab::kExitUsage;
  }

  try {
    if (run_cmd->parsed()) {
      run_opts.seed_set = run_seed->count() > 0;
      const auto outcome = fplab::lab::run_to_files(load_config(run_opts));
      print_report(outcome.report);
      std::printf("wrote %s and %s\n", outcome.summary_path.c_str(), outcome.trials_path.c_str());
      return outcome.exit_code;
    }
    sweep_opts.seed_set = sweep_seed->count() > 0;
    const auto outcome =
        fplab::lab::run_sweep(load_config(sweep_opts), axis, parse_values(values_csv));
    for (const auto& run : outcome.runs) print_report(run.report);
    std::printf("wrote %s\n", outcome.combined_csv_path.c_str());
    return outcome.exit_code;
  } catch (const fplab::lab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fplab::lab::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fplab::lab::kExitUsage;
  }
}
