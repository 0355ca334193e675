#include <chrono>
#include <cmath>

#include "acceptance/criteria.hpp"
#include "fplab/assouad.hpp"
#include "fplab/lab/experiments.hpp"

namespace acceptance {

namespace {

using fplab::lab::LabConfig;
using fplab::lab::Report;

LabConfig base_config(const std::string& experiment, std::uint64_t seed) {
  LabConfig cfg;
  cfg.experiment_id = experiment;
  cfg.seed = seed;
  cfg.has_seed = true;
  cfg.workers = 0;
  return cfg;
}

void require_all_rows(Checker& check, const Report& rep, const std::string& label) {
  for (const auto& row : rep.rows) {
    if (!row.pass) {
      std::ostringstream what;
      what << label << ": row '" << row.name << "' failed (estimate=" << row.estimate
           << ", target=" << row.target << ", " << row.comparator << ")";
      check.require(false, what.str());
    }
  }
  check.require(rep.all_pass(), label + ": all rows pass");
}

}  // namespace

CriterionResult criterion_5_fourth_moment() {
  Checker check;
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t seed = 5001;
  for (const int d : {2, 3}) {
    LabConfig cfg = base_config("fourth_moment_identity", seed++);
    cfg.d = d;
    cfg.mc_samples = 1000000;
    const Report rep = fplab::lab::run_experiment(cfg, nullptr);
    require_all_rows(check, rep, "fourth_moment_identity d=" + std::to_string(d));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.require_le(secs, 300.0, "both dimensions finish under five minutes");
  return check.result();
}

CriterionResult criterion_6_covsamp_invariants() {
  Checker check;
  std::uint64_t seed = 6001;
  for (const int d : {1, 2, 5, 10, 20}) {
    LabConfig cfg = base_config("covsamp_invariants", seed++);
    cfg.d = d;
    cfg.reps = 1000;
    const Report rep = fplab::lab::run_experiment(cfg, nullptr);
    require_all_rows(check, rep, "covsamp_invariants d=" + std::to_string(d));
  }
  return check.result();
}

CriterionResult criterion_7_reduction_factor() {
  Checker check;
  LabConfig cfg = base_config("reduction_factor32", 7001);
  cfg.d = 3;
  cfg.n = 100000;
  cfg.reps = 200;
  const Report rep = fplab::lab::run_experiment(cfg, nullptr);
  require_all_rows(check, rep, "reduction_factor32");
  return check.result();
}

CriterionResult criterion_9_heavy_tailed() {
  Checker check;
  LabConfig cfg = base_config("heavy_tailed_assouad", 9001);
  cfg.d = 20;
  cfg.alpha = 0.5;
  cfg.eps = 0.4;
  cfg.delta = 0.1;
  const Report rep = fplab::lab::run_experiment(cfg, nullptr);
  require_all_rows(check, rep, "heavy_tailed_assouad");

  // Canonical bound value, exact arithmetic: 20 / (50 * 0.5 * 0.25) = 3.2.
  const auto nb = fplab::assouad::heavy_tailed_n_bound(0.5, 20, 0.4, 0.1);
  check.require_close(nb.value, 3.2, 1e-12, "n bound at (alpha=0.5, d=20, eps=0.4, delta=0.1)");
  return check.result();
}

CriterionResult criterion_10_concentration() {
  Checker check;
  LabConfig cfg = base_config("concentration_suite", 10001);
  cfg.mc_samples = 1000000;
  const Report rep = fplab::lab::run_experiment(cfg, nullptr);
  require_all_rows(check, rep, "concentration_suite");
  return check.result();
}

}  // namespace acceptance
