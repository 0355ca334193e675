#include "fplab/lab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "fplab/assouad.hpp"
#include "fplab/concentration.hpp"
#include "fplab/expfam.hpp"
#include "fplab/fingerprint.hpp"
#include "fplab/hard_instances.hpp"
#include "fplab/linalg.hpp"
#include "fplab/mechanisms.hpp"
#include "fplab/parallel.hpp"
#include "fplab/rng.hpp"
#include "fplab/stats.hpp"

namespace fplab::lab {

namespace {

using expfam::ExpFamilyModel;
using hard::PriorBox;

ExpFamilyModel make_model(const LabConfig& cfg) {
  if (cfg.family == "bernoulli_product") return ExpFamilyModel::bernoulli_product(cfg.d);
  if (cfg.family == "gaussian_mean") return ExpFamilyModel::gaussian_mean(cfg.d);
  if (cfg.family == "gaussian_covariance") return ExpFamilyModel::gaussian_covariance(cfg.d);
  throw ConfigError("experiment requires a family");
}

PriorBox make_box(const LabConfig& cfg) {
  if (cfg.family == "bernoulli_product") return hard::product_prior(cfg.d);
  if (cfg.family == "gaussian_mean") return hard::gaussian_mean_prior(cfg.d);
  if (cfg.family == "gaussian_covariance") return hard::cov_prior_box(cfg.d);
  throw ConfigError("experiment requires a family");
}

mech::BoxMechanism make_mechanism(const LabConfig& cfg, const ExpFamilyModel& model,
                                  const PriorBox& box) {
  if (cfg.mech_id == "constant") return mech::make_constant(box);
  if (cfg.mech_id == "plugin") return mech::make_plugin(model, box);
  if (cfg.mech_id == "dp_gauss_cov") {
    if (cfg.family != "gaussian_covariance") {
      throw ConfigError("mech dp_gauss_cov requires family gaussian_covariance");
    }
    return mech::make_dp_covariance(cfg.d, cfg.eps, cfg.delta, cfg.clip);
  }
  if (cfg.mech_id == "dp_gauss_mean") {
    if (cfg.family != "gaussian_mean") {
      throw ConfigError("mech dp_gauss_mean requires family gaussian_mean");
    }
    return mech::make_dp_mean(box, cfg.eps, cfg.delta, cfg.clip);
  }
  throw ConfigError("experiment requires a mechanism");
}

double default_tail_threshold(const LabConfig& cfg) {
  if (cfg.t_thresh > 0.0) return cfg.t_thresh;
  if (cfg.family == "gaussian_covariance") {
    if (cfg.delta <= 0.0) {
      throw ConfigError("thm35_terms: the covariance threshold recipe needs delta > 0; "
                        "set t_thresh explicitly for delta = 0");
    }
    return fp::cov_tail_threshold(cfg.d, cfg.delta);
  }
  if (cfg.family == "bernoulli_product") return fp::product_tail_threshold(cfg.d);
  if (cfg.family == "gaussian_mean") {
    return fp::gauss_mean_tail_threshold(cfg.d, cfg.delta > 0.0 ? cfg.delta : 1e-6);
  }
  throw ConfigError("experiment requires a family");
}

void add_column(TrialTable* t, std::string name, std::vector<double> values) {
  if (!t) return;
  t->columns.push_back(std::move(name));
  t->values.push_back(std::move(values));
}

// ---------------------------------------------------------------------------

void run_lemma32(const LabConfig& cfg, Report& rep, TrialTable* trials) {
  const ExpFamilyModel model = make_model(cfg);
  const PriorBox box = make_box(cfg);
  const mech::BoxMechanism mechanism = make_mechanism(cfg, model, box);

  const auto res = fp::fingerprint_lhs(model, box, mechanism, cfg.n, cfg.outer_trials,
                                       Stream(cfg.seed), cfg.workers);
  const double bound = box.width_sq_norm() / 12.0;

  rep.rows.push_back(row_lower_bound(
      "lhs_lower_bound", res.lhs.mean, res.lhs.se, bound, 3.0,
      "fingerprinting bound: E[Z + |a - (eta - m)|^2] >= |R|^2 / 12 for every in-box estimator"));
  if (cfg.mech_id == "constant") {
    rep.rows.push_back(row_mc("ez_zero", res.ez.mean, res.ez.se, 0.0, 3.0,
                              "data-independent probe is uncorrelated with the samples"));
    rep.rows.push_back(row_mc("mse_equality", res.mse.mean, res.mse.se, bound, 3.0,
                              "midpoint estimate attains MSE = |R|^2 / 12 against the uniform prior"));
    rep.rows.push_back(row_mc("lhs_equality", res.lhs.mean, res.lhs.se, bound, 3.0,
                              "equality case of the fingerprinting bound"));
  } else {
    rep.rows.push_back(row_report("ez", res.ez.mean, res.ez.se, "total correlation estimate"));
    rep.rows.push_back(row_report("mse", res.mse.mean, res.mse.se, "mechanism squared error"));
  }
  add_column(trials, "z", res.z_per_trial);
  add_column(trials, "err2", res.err2_per_trial);
}

void run_lemma33(const LabConfig& cfg, Report& rep, TrialTable* trials) {
  const ExpFamilyModel model = make_model(cfg);
  const PriorBox box = make_box(cfg);
  const mech::BoxMechanism mechanism = make_mechanism(cfg, model, box);

  const Stream root(cfg.seed);
  Rng eta_rng = root.child(0).rng();
  const Vec eta = box.sample_eta(eta_rng);

  const auto res = fp::ztilde_moments(model, box, eta, mechanism, cfg.n, 0, cfg.inner_trials,
                                      root.child(1), cfg.workers);

  rep.rows.push_back(row_mc("ztilde_mean_zero", res.mean.mean, res.mean.se, 0.0, 4.0,
                            "resampled correlation statistic has zero mean at fixed eta"));
  rep.rows.push_back(row_mc(
      "ztilde_variance_matches_quadform", res.var_gap.mean, res.var_gap.se, 0.0, 3.0,
      "Var of <s, T(X) - mu_T> equals E[s^T Cov[T] s]; row checks the per-trial gap"));
  rep.rows.push_back(row_report("ztilde_variance", res.variance, 0.0, "empirical variance"));
  rep.rows.push_back(
      row_report("sts_closed_form", res.sts.mean, res.sts.se, "closed-form quadratic form mean"));
  add_column(trials, "ztilde", res.ztilde_per_trial);
  add_column(trials, "sts", res.sts_per_trial);
}

void run_thm35(const LabConfig& cfg, Report& rep, TrialTable* trials) {
  const ExpFamilyModel model = make_model(cfg);
  const PriorBox box = make_box(cfg);
  const mech::BoxMechanism mechanism = make_mechanism(cfg, model, box);
  const double t_thresh = default_tail_threshold(cfg);

  const auto tt = fp::theorem_terms(model, box, mechanism, cfg.n, t_thresh, cfg.eps, cfg.delta,
                                    cfg.outer_trials, cfg.inner_trials, cfg.mc_samples,
                                    Stream(cfg.seed), cfg.workers);

  const double n = static_cast<double>(cfg.n);
  const double budget = tt.per_sample_budget();
  const double budget_se =
      std::sqrt(tt.term_eps.se * tt.term_eps.se + tt.term_tail.se * tt.term_tail.se);
  const bool claims_privacy = cfg.mech_id == "constant" || cfg.mech_id == "dp_gauss_cov" ||
                              cfg.mech_id == "dp_gauss_mean";

  // The budget inequality is a theorem about DP mechanisms; for a
  // non-private estimator the run reports the two sides instead, and the
  // exhibit below shows the ceiling being crossed.
  if (claims_privacy) {
    rep.rows.push_back(row_lower_bound(
        "privacy_budget_inequality", n * budget, n * budget_se, tt.rhs, 3.0,
        "n (2 delta T + 2 eps E sqrt(E[s^T Cov[T] s]) + 2 E[tail]) >= |R|^2 / 24 for accurate DP mechanisms"));
  } else {
    rep.rows.push_back(row_report("n_times_budget", n * budget, n * budget_se,
                                  "left side of the DP budget inequality (not asserted: "
                                  "the estimator claims no privacy)"));
    rep.rows.push_back(row_report("budget_inequality_rhs", tt.rhs, 0.0, "|R|^2 / 24"));
  }
  rep.rows.push_back(row_upper_bound(
      "mechanism_mse_within_hypothesis", tt.mse.mean, tt.mse.se, box.width_sq_norm() / 24.0, 3.0,
      "measured MSE must satisfy the accuracy hypothesis MSE <= |R|^2 / 24"));

  if (cfg.family == "gaussian_covariance") {
    const double alpha_sq = tt.mse.mean / 32.0;
    const double d4 = std::pow(static_cast<double>(cfg.d), 4.0);
    rep.rows.push_back(row_upper_bound(
        "s_quadform_upper_bound", tt.sts.mean, tt.sts.se, 4.0 * alpha_sq / d4, 3.0,
        "E[s^T Cov[T] s] <= 4 alpha^2 / d^4 with 32 alpha^2 = measured MSE"));
  }

  // Per-sample correlation against the budget. Privacy caps it; an accurate
  // non-private estimator can exceed it, which is exactly what the probe
  // configuration exhibits.
  const double psc_se = std::sqrt(tt.per_sample_corr.se * tt.per_sample_corr.se +
                                  budget_se * budget_se);
  if (claims_privacy) {
    rep.rows.push_back(row_upper_bound(
        "per_sample_correlation_within_budget", tt.per_sample_corr.mean, psc_se, budget, 3.0,
        "E[Z_i] <= 2 delta T + 2 eps E sqrt(E[s^T Cov[T] s]) + 2 E[tail] for DP mechanisms"));
  } else {
    rep.rows.push_back(row_report("per_sample_correlation", tt.per_sample_corr.mean,
                                  tt.per_sample_corr.se,
                                  "E[Z_i] for the non-private estimator (may exceed the budget)"));
    rep.rows.push_back(row_report(
        "correlation_ceiling_margin", tt.per_sample_corr.mean - budget, psc_se,
        "positive values exhibit a correlation above the privacy-implied ceiling"));
  }

  rep.rows.push_back(row_report("term_delta", tt.term_delta, 0.0, "2 delta T"));
  rep.rows.push_back(row_report("term_eps", tt.term_eps.mean, tt.term_eps.se,
                                "2 eps E_eta sqrt(E[s^T Cov[T] s])"));
  rep.rows.push_back(row_report("term_eps_max_eta", tt.term_eps_max, 0.0,
                                "worst sampled eta variant of term_eps"));
  rep.rows.push_back(
      row_report("term_tail", tt.term_tail.mean, tt.term_tail.se, "2 E_eta[tail integral]"));
  rep.rows.push_back(row_report("tail_threshold", t_thresh, 0.0, "threshold T used"));

  // The empirical tail integral truncates at the largest observed weight;
  // the closed-form bound evaluated there caps what the truncation discards.
  double truncation = std::numeric_limits<double>::quiet_NaN();
  const double cut = std::max(t_thresh, tt.max_tail_weight);
  if (cfg.family == "gaussian_covariance" && cfg.d >= 2) {
    truncation = fp::cov_tail_bound(cfg.d, std::max(cut, 1.0 / (3.0 * cfg.d * cfg.d)));
  } else if (cfg.family == "gaussian_mean") {
    truncation = fp::gauss_mean_tail_bound(cfg.d, std::max(cut, 2.0 * cfg.d));
  } else if (cfg.family == "bernoulli_product") {
    truncation = 0.0;  // bounded support: nothing exists beyond the cap
  }
  rep.rows.push_back(row_report("tail_truncation_bound", truncation, 0.0,
                                "closed-form bound on the tail mass beyond the largest "
                                "observed weight"));
  rep.rows.push_back(row_report("max_tail_weight", tt.max_tail_weight, 0.0,
                                "largest observed scaled statistic deviation"));
  rep.rows.push_back(row_report("implied_n_bound", tt.implied_n_bound, 0.0,
                                "|R|^2 / (96 eps E sqrt(...)); 48 when delta = 0"));
  add_column(trials, "sts", tt.sts_per_trial);
  add_column(trials, "err2", tt.err2_per_trial);
  add_column(trials, "z", tt.z_per_trial);
}

void run_covsamp(const LabConfig& cfg, Report& rep, TrialTable* trials) {
  const int d = cfg.d;
  const std::int64_t reps = cfg.reps;
  const Stream root(cfg.seed);

  std::vector<double> lam_min(reps), lam_max(reps);
  std::vector<Vec> draws(static_cast<std::size_t>(reps));
  parallel_for(reps, cfg.workers, [&](std::int64_t r) {
    Rng rng = root.child(static_cast<std::uint64_t>(r)).rng();
    hard::CovInstance inst = hard::cov_samp(d, rng);
    const auto range = linalg::eig_range_symmetric(inst.sigma);
    lam_min[static_cast<std::size_t>(r)] = range.first;
    lam_max[static_cast<std::size_t>(r)] = range.second;
    draws[static_cast<std::size_t>(r)] = std::move(inst.eta0);
  });

  const PriorBox box = hard::cov_prior_box(d);
  rep.rows.push_back(row_lower_bound("sigma_min_eigenvalue",
                                     *std::min_element(lam_min.begin(), lam_min.end()), 0.0,
                                     1.0 - 1e-9, 0.0, "every sampled covariance satisfies Sigma >= I"));
  rep.rows.push_back(row_upper_bound("sigma_max_eigenvalue",
                                     *std::max_element(lam_max.begin(), lam_max.end()), 0.0,
                                     2.0 + 1e-9, 0.0, "every sampled covariance satisfies Sigma <= 2I"));
  rep.rows.push_back(row_exact("width_sq_norm", box.width_sq_norm(),
                               0.5 * (1.0 - 1.0 / (2.0 * d)), 1e-12,
                               "|R|^2 = (1/2)(1 - 1/(2d)) for the precision box"));
  // At d = 1 there are no off-diagonal coordinates; the widest interval is
  // the diagonal one of length 1/(2d).
  rep.rows.push_back(row_exact("width_inf_norm", box.width_inf_norm(),
                               d == 1 ? 0.5 : 1.0 / d, 1e-15,
                               "|R|_inf = 1/d (1/(2d) in one dimension)"));

  // Midpoint pattern: 3/4 on the flattened diagonal, 0 elsewhere. The
  // diagonal tolerance absorbs endpoint rounding.
  const Vec m = box.midpoint();
  double diag_err = 0.0, off_err = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double v = m[static_cast<std::size_t>(i) * d + j];
      if (i == j) diag_err = std::max(diag_err, std::abs(v - 0.75));
      else off_err = std::max(off_err, std::abs(v));
    }
  rep.rows.push_back(row_exact("midpoint_diagonal", diag_err, 0.0, 1e-14,
                               "midpoint is 3/4 at flattened diagonal indices"));
  rep.rows.push_back(row_exact("midpoint_off_diagonal", off_err, 0.0, 0.0,
                               "midpoint vanishes off the flattened diagonal"));

  // Pairwise correlations of the non-degenerate coordinates.
  std::vector<int> live;
  for (int j = 0; j < d * d; ++j)
    if (!box.degenerate(j)) live.push_back(j);
  const int kl = static_cast<int>(live.size());
  std::vector<double> mean(kl, 0.0);
  for (const auto& eta : draws)
    for (int a = 0; a < kl; ++a) mean[a] += eta[live[a]];
  for (auto& v : mean) v /= static_cast<double>(reps);
  std::vector<double> cov(static_cast<std::size_t>(kl) * kl, 0.0);
  for (const auto& eta : draws)
    for (int a = 0; a < kl; ++a) {
      const double da = eta[live[a]] - mean[a];
      for (int b = a; b < kl; ++b) cov[static_cast<std::size_t>(a) * kl + b] += da * (eta[live[b]] - mean[b]);
    }
  double max_corr = 0.0;
  for (int a = 0; a < kl; ++a)
    for (int b = a + 1; b < kl; ++b) {
      const double va = cov[static_cast<std::size_t>(a) * kl + a];
      const double vb = cov[static_cast<std::size_t>(b) * kl + b];
      if (va > 0.0 && vb > 0.0) {
        max_corr = std::max(max_corr,
                            std::abs(cov[static_cast<std::size_t>(a) * kl + b]) / std::sqrt(va * vb));
      }
    }
  const double corr_se = 1.0 / std::sqrt(static_cast<double>(reps));
  if (kl > 1) {
    // Max over all pairs, so the threshold carries the extreme-value factor
    // sqrt(2 ln #pairs) on top of the per-pair 4 SE margin.
    const double pairs = 0.5 * kl * (kl - 1);
    const double max_quantile = std::sqrt(2.0 * std::log(std::max(pairs, 2.0)));
    rep.rows.push_back(row_upper_bound("eta0_max_pairwise_correlation", max_corr, corr_se, 0.0,
                                       max_quantile + 4.0,
                                       "coordinates of the parameter draw are independent"));
  }
  add_column(trials, "lambda_min", lam_min);
  add_column(trials, "lambda_max", lam_max);
}

void run_fourth_moment(const LabConfig& cfg, Report& rep, TrialTable* trials) {
  const int d = cfg.d;
  const int k = d * d;
  const Stream root(cfg.seed);
  Rng sigma_rng = root.child(0).rng();
  const hard::CovInstance inst = hard::cov_samp(d, sigma_rng);
  const linalg::Mat& sigma = inst.sigma;

  const linalg::Mat kron = linalg::kronecker(sigma, sigma);
  const Vec sigma_flat = linalg::flatten(sigma);
  const linalg::Mat root_sigma = linalg::sym_sqrt(sigma);

  constexpr int kNumVectors = 20;  // first half symmetric, second half general
  std::vector<double> mc(kNumVectors), closed(kNumVectors), se(kNumVectors), sym_gap(kNumVectors);

  parallel_for(kNumVectors, cfg.workers, [&](std::int64_t vi) {
    Rng rng = root.child(1 + static_cast<std::uint64_t>(vi)).rng();
    Vec v(k);
    if (vi < kNumVectors / 2) {
      linalg::Mat s(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          const double g = rng.normal();
          s(i, j) = g;
          s(j, i) = g;
        }
      v = linalg::flatten(s);
    } else {
      for (auto& x : v) x = rng.normal();
    }
    const double inv_norm = 1.0 / linalg::l2_norm(v);
    for (auto& x : v) x *= inv_norm;

    // Closed form through the materialized Kronecker matrix.
    const Vec kv = linalg::matvec(kron, v);
    const Vec tfv = linalg::transpose_flatten(v);
    const double dot_sigma = linalg::dot(v, sigma_flat);
    const double general = linalg::dot(v, kv) + linalg::dot(tfv, kv) + dot_sigma * dot_sigma;
    closed[vi] = general;
    // The symmetric reduction 2 v'Kv + (v'Sigma_flat)^2 agrees on symmetric v.
    sym_gap[vi] = (vi < kNumVectors / 2)
                      ? std::abs(2.0 * linalg::dot(v, kv) + dot_sigma * dot_sigma - general)
                      : 0.0;

    // Monte Carlo of E <v, X (x) X>^2 over fresh Gaussian samples.
    double sum = 0.0, sum_sq = 0.0;
    Vec z(d), x(d);
    for (std::int64_t s = 0; s < cfg.mc_samples; ++s) {
      for (int j = 0; j < d; ++j) z[j] = rng.normal();
      for (int a = 0; a < d; ++a) {
        double acc = 0.0;
        for (int b = 0; b < d; ++b) acc += root_sigma(a, b) * z[b];
        x[a] = acc;
      }
      double q = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) q += v[static_cast<std::size_t>(a) * d + b] * x[a] * x[b];
      const double y = q * q;
      sum += y;
      sum_sq += y * y;
    }
    const double nmc = static_cast<double>(cfg.mc_samples);
    mc[vi] = sum / nmc;
    const double var = std::max(sum_sq / nmc - mc[vi] * mc[vi], 0.0);
    se[vi] = std::sqrt(var / nmc);
  });

  double max_dev = 0.0;
  for (int vi = 0; vi < kNumVectors; ++vi) {
    const double z = se[vi] > 0.0 ? std::abs(mc[vi] - closed[vi]) / se[vi] : 0.0;
    max_dev = std::max(max_dev, z);
  }
  rep.rows.push_back(row_upper_bound(
      "fourth_moment_max_std_dev", max_dev, 0.0, 3.0, 0.0,
      "v' E[(X(x)X)(X(x)X)'] v = v'S2v + v'S2 tf(v) + (v'Sigma_flat)^2, S2 = Sigma(x)Sigma"));
  rep.rows.push_back(row_exact("symmetric_reduction_gap",
                               *std::max_element(sym_gap.begin(), sym_gap.end()), 0.0, 1e-10,
                               "on symmetric flats the identity reduces to 2 v'S2v + (v'Sigma_flat)^2"));

  if (trials) {
    std::vector<double> idx(kNumVectors);
    for (int i = 0; i < kNumVectors; ++i) idx[i] = i;
    add_column(trials, "v_index", idx);
    add_column(trials, "mc_estimate", mc);
    add_column(trials, "closed_form", closed);
    add_column(trials, "mc_se", se);
  }
}

void run_reduction32(const LabConfig& cfg, Report& rep, TrialTable* trials) {
  const int d = cfg.d;
  const ExpFamilyModel model = ExpFamilyModel::gaussian_covariance(d);
  const PriorBox box = hard::cov_prior_box(d);
  const Vec m = box.midpoint();
  const Stream root(cfg.seed);

  const std::int64_t reps = cfg.reps;
  std::vector<double> err2(reps), maha2(reps), gap(reps), proj_ok(reps);
  parallel_for(reps, cfg.workers, [&](std::int64_t r) {
    Rng rng = root.child(static_cast<std::uint64_t>(r)).rng();
    const hard::CovInstance inst = hard::cov_samp(d, rng);
    const Dataset x = model.sample(inst.eta0, cfg.n, rng);
    const linalg::Mat sigma_hat = mech::empirical_covariance(x);

    const double maha = linalg::mahalanobis_mat(sigma_hat - inst.sigma, inst.sigma);
    maha2[r] = maha * maha;

    const mech::Estimate est = mech::nat_param_est(sigma_hat, d, m);
    double e2 = 0.0;
    for (int j = 0; j < d * d; ++j) {
      const double dev = est.value[j] - (inst.eta0[j] - m[j]);
      e2 += dev * dev;
    }
    err2[r] = e2;
    gap[r] = e2 - 32.0 * maha2[r];

    // Does the precision-space clamp behave like a Frobenius projection here?
    Vec eta_tilde = est.value;
    for (int j = 0; j < d * d; ++j) eta_tilde[j] += m[j];
    const linalg::Mat sigma_tilde = model.covariance_from_eta(eta_tilde);
    proj_ok[r] = linalg::frobenius_norm(sigma_hat - sigma_tilde) <=
                         linalg::frobenius_norm(sigma_hat - inst.sigma) + 1e-12
                     ? 1.0
                     : 0.0;
  });

  const auto gap_stats = stats::mean_se(gap);
  rep.rows.push_back(row_upper_bound(
      "reduction_factor_32", gap_stats.mean, gap_stats.se, 0.0, 3.0,
      "E|T_M(X) - (eta0 - m)|^2 <= 32 E[Mahalanobis MSE] for the precision-clamp reduction"));
  const auto err_stats = stats::mean_se(err2);
  const auto maha_stats = stats::mean_se(maha2);
  rep.rows.push_back(row_report("nat_param_mse", err_stats.mean, err_stats.se,
                                "squared error of the reduced estimator"));
  rep.rows.push_back(row_report("mahalanobis_mse", maha_stats.mean, maha_stats.se,
                                "squared Mahalanobis error of the covariance estimate"));
  const auto proj_stats = stats::mean_se(proj_ok);
  rep.rows.push_back(row_report(
      "projection_distance_nonincrease_fraction", proj_stats.mean, proj_stats.se,
      "fraction of instances where |S_hat - S_tilde|_F <= |S_hat - Sigma|_F (measured, not assumed)"));

  add_column(trials, "err2", err2);
  add_column(trials, "maha2", maha2);
  add_column(trials, "gap", gap);
  add_column(trials, "proj_ok", proj_ok);
}

void run_heavy_tailed(const LabConfig& cfg, Report& rep, TrialTable* trials) {
  const int d = cfg.d;
  const Stream root(cfg.seed);
  Rng sign_rng = root.child(0).rng();
  Vec sign_v(d);
  for (int j = 0; j < d; ++j) sign_v[j] = sign_rng.bernoulli(0.5) ? 1.0 : -1.0;
  const hard::HeavyTailedSpec spec = hard::default_heavy_spec(sign_v, cfg.alpha);
  const double p = spec.spike_p;
  const double t = spec.spike_t;

  rep.rows.push_back(row_exact("pt_squared_budget", p * t * t, 1.0, 1e-12,
                               "the default (p, t) saturates the second-moment budget p t^2 = 1"));
  rep.rows.push_back(row_exact("tau_equals_2p", 2.0 * p * p * t * t, 2.0 * p, 1e-12,
                               "per-coordinate separation tau = 2 p^2 t^2 = 2 p under p t^2 = 1"));

  // Separation formula against a directly computed mean distance.
  Rng pair_rng = root.child(1).rng();
  Vec u(d), v(d);
  for (int j = 0; j < d; ++j) {
    u[j] = pair_rng.bernoulli(0.5) ? 1.0 : -1.0;
    v[j] = pair_rng.bernoulli(0.5) ? 1.0 : -1.0;
  }
  double direct = 0.0;
  for (int j = 0; j < d; ++j) {
    const double diff = p * t * u[j] - p * t * v[j];
    direct += diff * diff;
  }
  rep.rows.push_back(row_exact("mixture_separation_direct", assouad::mixture_separation(spec, u, v),
                               direct, 1e-12, "4 p^2 t^2 Hamming(u, v) equals the direct mean distance"));

  // Second moment along random unit directions, one shared dataset.
  Rng data_rng = root.child(2).rng();
  const Dataset x = hard::heavy_sample(spec, cfg.n, data_rng);
  Rng dir_rng = root.child(3).rng();
  constexpr int kDirections = 50;
  const double target = spec.direction_second_moment();
  double max_dir_dev = 0.0;
  double dir_min = std::numeric_limits<double>::infinity();
  double dir_max = -std::numeric_limits<double>::infinity();
  std::vector<double> proj(static_cast<std::size_t>(cfg.n));
  for (int dir = 0; dir < kDirections; ++dir) {
    Vec uu(d);
    double norm_sq = 0.0;
    for (int j = 0; j < d; ++j) {
      uu[j] = dir_rng.normal();
      norm_sq += uu[j] * uu[j];
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& w : uu) w *= inv;
    for (int i = 0; i < cfg.n; ++i) {
      const auto row = x.row(i);
      double ip = 0.0;
      for (int j = 0; j < d; ++j) ip += (row[j] - spec.mean_coord(j)) * uu[j];
      proj[static_cast<std::size_t>(i)] = ip * ip;
    }
    const auto ms = stats::mean_se(proj);
    dir_min = std::min(dir_min, ms.mean);
    dir_max = std::max(dir_max, ms.mean);
    if (ms.se > 0.0) max_dir_dev = std::max(max_dir_dev, std::abs(ms.mean - target) / ms.se);
  }
  rep.rows.push_back(row_upper_bound(
      "second_moment_max_std_dev", max_dir_dev, 0.0, 3.0, 0.0,
      "second moment along random unit directions equals p (1 - p) t^2"));
  rep.rows.push_back(row_report("second_moment_direction_min", dir_min, 0.0,
                                "smallest directional second-moment estimate"));
  rep.rows.push_back(row_report("second_moment_direction_max", dir_max, 0.0,
                                "largest directional second-moment estimate"));

  // Coupling: expected Hamming distance n p, off coordinates identical.
  std::vector<double> ham(static_cast<std::size_t>(cfg.reps));
  double off_coord_mismatch = 0.0;
  for (std::int64_t r = 0; r < cfg.reps; ++r) {
    Rng rng = root.child(4 + static_cast<std::uint64_t>(r)).rng();
    const int coord = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(d));
    const hard::Coupling c = hard::assouad_coupling(spec, coord, cfg.n, rng);
    ham[static_cast<std::size_t>(r)] = static_cast<double>(c.hamming);
    for (int i = 0; i < cfg.n; ++i) {
      const auto xr = c.x.row(i);
      const auto yr = c.y.row(i);
      for (int j = 0; j < d; ++j) {
        if (j != coord && xr[j] != yr[j]) off_coord_mismatch += 1.0;
      }
    }
  }
  const auto ham_stats = stats::mean_se(ham);
  rep.rows.push_back(row_mc("coupling_mean_hamming", ham_stats.mean, ham_stats.se,
                            static_cast<double>(cfg.n) * p, 3.0,
                            "expected coupling Hamming distance D = n p"));
  rep.rows.push_back(row_exact("coupling_off_coordinate_mismatch", off_coord_mismatch, 0.0, 0.0,
                               "coordinates other than the flipped one agree row by row"));

  const auto nb = assouad::heavy_tailed_n_bound(cfg.alpha, d, cfg.eps, cfg.delta);
  rep.rows.push_back(row_exact("n_bound_inversion",
                               nb.value * 50.0 * (cfg.eps + cfg.delta) * cfg.alpha * cfg.alpha,
                               static_cast<double>(d), 1e-9,
                               "d / (50 (eps + delta) alpha^2) inverts back to d"));
  rep.rows.push_back(row_report("heavy_tailed_n_bound", nb.value, 0.0,
                                "sample-size bound at the configured (alpha, d, eps, delta)"));

  add_column(trials, "hamming", ham);
}

void run_concentration(const LabConfig& cfg, Report& rep, TrialTable* trials) {
  const Stream root(cfg.seed);
  const std::int64_t nmc = cfg.mc_samples;
  constexpr int kGrid = 10;

  std::vector<double> kind_col, t_col, emp_col, bound_col;
  auto record = [&](double kind, double t, double emp, double bound) {
    kind_col.push_back(kind);
    t_col.push_back(t);
    emp_col.push_back(emp);
    bound_col.push_back(bound);
  };

  int kind_tag = 0;
  for (const int k : {5, 20}) {
    Rng rng = root.child(static_cast<std::uint64_t>(100 + k)).rng();
    std::vector<double> samples(static_cast<std::size_t>(nmc));
    for (auto& s : samples) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j) {
        const double g = rng.normal();
        acc += g * g;
      }
      s = acc;
    }
    std::sort(samples.begin(), samples.end());
    const auto tail_count = [&](double t) {
      return static_cast<double>(samples.end() -
                                 std::lower_bound(samples.begin(), samples.end(), t)) /
             static_cast<double>(nmc);
    };

    double worst_upper = -1.0, worst_lower = -1.0;
    for (int g = 0; g < kGrid; ++g) {
      const double t_up = k + (g + 1) * 0.8 * std::sqrt(2.0 * k);
      const double b_up = fp::chi_square_upper_bound(k, t_up);
      const double e_up = tail_count(t_up);
      worst_upper = std::max(worst_upper, e_up - b_up);
      record(kind_tag, t_up, e_up, b_up);

      const double t_lo = k * (1.0 - (g + 1) / static_cast<double>(kGrid));
      const double b_lo = fp::chi_square_lower_bound(k, t_lo);
      const double e_lo = 1.0 - tail_count(t_lo);  // P[X <= t], up to ties of measure zero
      worst_lower = std::max(worst_lower, e_lo - b_lo);
      record(kind_tag + 1, t_lo, e_lo, b_lo);
    }
    rep.rows.push_back(row_upper_bound(
        "chi_square_upper_margin_k" + std::to_string(k), worst_upper, 0.0, 0.0, 0.0,
        "empirical upper tail stays below exp(-(sqrt(2t-k)-sqrt(k))^2/4)"));
    rep.rows.push_back(row_upper_bound(
        "chi_square_lower_margin_k" + std::to_string(k), worst_lower, 0.0, 0.0, 0.0,
        "empirical lower tail stays below exp(-(k-t)^2/(4k))"));
    kind_tag += 2;
  }

  {
    constexpr int d = 5;
    Rng rng = root.child(200).rng();
    linalg::Mat a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        const double g = rng.normal();
        a(i, j) = g;
        a(j, i) = g;
      }
    const double frob = linalg::frobenius_norm(a);
    const double spec_norm = linalg::spectral_norm(a);
    double trace = 0.0;
    for (int i = 0; i < d; ++i) trace += a(i, i);

    std::vector<double> q(static_cast<std::size_t>(nmc));
    Vec x(d);
    for (auto& s : q) {
      for (int j = 0; j < d; ++j) x[j] = rng.normal();
      double acc = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) acc += x[i] * a(i, j) * x[j];
      s = std::abs(acc - trace);
    }
    std::sort(q.begin(), q.end());
    double worst = -1.0;
    for (int g = 0; g < kGrid; ++g) {
      const double t = (g + 1) * 2.0 * frob;
      const double emp = static_cast<double>(q.end() - std::lower_bound(q.begin(), q.end(), t)) /
                         static_cast<double>(nmc);
      const double bound = fp::hanson_wright_bound(t, frob, spec_norm);
      worst = std::max(worst, emp - bound);
      record(kind_tag, t, emp, bound);
    }
    rep.rows.push_back(row_upper_bound(
        "hanson_wright_margin_d5", worst, 0.0, 0.0, 0.0,
        "empirical two-sided quadratic-form tail stays below the Gaussian quadratic-form bound"));
    ++kind_tag;
  }

  {
    double worst = -1.0;
    for (int g = 0; g < kGrid; ++g) {
      const double xx = g * 0.35;
      const double emp = std::erfc(xx);
      const double bound = fp::erfc_bound(xx);
      worst = std::max(worst, emp - bound);
      record(kind_tag, xx, emp, bound);
    }
    rep.rows.push_back(
        row_upper_bound("erfc_margin", worst, 0.0, 0.0, 0.0, "erfc(x) <= exp(-x^2) on a grid"));
  }

  if (trials) {
    add_column(trials, "kind", kind_col);
    add_column(trials, "t", t_col);
    add_column(trials, "empirical", emp_col);
    add_column(trials, "bound", bound_col);
  }
}

void run_appendix_product(const LabConfig& cfg, Report& rep, TrialTable* trials) {
  const int d = cfg.d;
  const ExpFamilyModel model = ExpFamilyModel::bernoulli_product(d);
  const PriorBox box = hard::product_prior(d);
  const Stream root(cfg.seed);

  const double ln2 = std::log(2.0);
  rep.rows.push_back(row_exact("width_sq_norm", box.width_sq_norm(), 4.0 * ln2 * ln2 * d, 1e-12,
                               "|R|^2 = 4 ln^2(2) d for the product box"));

  const double t_thresh = fp::product_tail_threshold(d);
  const Stream tail_stream = root.child(0);
  double max_w = 0.0, max_tail = 0.0;
  std::vector<double> tails(static_cast<std::size_t>(cfg.reps));
  for (std::int64_t r = 0; r < cfg.reps; ++r) {
    Rng rng = tail_stream.child(static_cast<std::uint64_t>(r)).rng();
    const Vec eta = box.sample_eta(rng);
    const auto w = fp::tail_weight_samples(model, eta, box, cfg.mc_samples, rng);
    max_w = std::max(max_w, *std::max_element(w.begin(), w.end()));
    tails[static_cast<std::size_t>(r)] = fp::survival_integral(w, t_thresh);
    max_tail = std::max(max_tail, tails[static_cast<std::size_t>(r)]);
  }
  rep.rows.push_back(row_upper_bound("tail_weight_support_bound", max_w, 0.0, t_thresh, 0.0,
                                     "W = |T(X) - mu_T| |R|_inf^3 sqrt(k)/4 never exceeds (4/3) ln^3(2) d"));
  rep.rows.push_back(row_exact("tail_integral_zero_at_threshold", max_tail, 0.0, 0.0,
                               "the correlation tail integral vanishes at T = (4/3) ln^3(2) d"));

  // Squared-error inflation of the logit map on in-range inputs.
  Rng infl_rng = root.child(1).rng();
  double max_ratio = 0.0;
  const std::int64_t draws = std::max<std::int64_t>(cfg.mc_samples, 1000);
  for (std::int64_t i = 0; i < draws; ++i) {
    Vec pt(d), ph(d);
    for (int j = 0; j < d; ++j) {
      pt[j] = infl_rng.uniform(1.0 / 3.0, 2.0 / 3.0);
      ph[j] = std::clamp(pt[j] + infl_rng.uniform(-0.1, 0.1), 1.0 / 3.0, 2.0 / 3.0);
    }
    const Vec a = mech::logit_reduction(ph).value;
    const Vec b = mech::logit_reduction(pt).value;
    double num = 0.0, den = 0.0;
    for (int j = 0; j < d; ++j) {
      num += (a[j] - b[j]) * (a[j] - b[j]);
      den += (ph[j] - pt[j]) * (ph[j] - pt[j]);
    }
    if (den > 1e-30) max_ratio = std::max(max_ratio, num / den);
  }
  rep.rows.push_back(row_upper_bound("logit_mse_inflation", max_ratio, 0.0, 81.0 / 4.0, 0.0,
                                     "squared-error inflation of the logit map is at most 81/4 on [1/3, 2/3]"));

  add_column(trials, "tail_integral", tails);
}

void run_appendix_gaussmean(const LabConfig& cfg, Report& rep, TrialTable* trials) {
  const int d = cfg.d;
  const ExpFamilyModel model = ExpFamilyModel::gaussian_mean(d);
  const PriorBox box = hard::gaussian_mean_prior(d);
  const Stream root(cfg.seed);

  std::vector<double> t_col, tail_col, bound_col;
  int row_idx = 0;
  for (const double mult : {2.0, 2.5, 3.0}) {
    const double t_thresh = mult * d;
    const double bound = fp::gauss_mean_tail_bound(d, t_thresh);
    const Stream t_stream = root.child(static_cast<std::uint64_t>(row_idx));
    double worst = 0.0;
    for (std::int64_t r = 0; r < cfg.reps; ++r) {
      Rng rng = t_stream.child(static_cast<std::uint64_t>(r)).rng();
      const Vec eta = box.sample_eta(rng);
      const double tail = fp::tail_integral(model, eta, box, t_thresh, cfg.mc_samples, rng);
      worst = std::max(worst, tail);
      t_col.push_back(t_thresh);
      tail_col.push_back(tail);
      bound_col.push_back(bound);
    }
    rep.rows.push_back(row_upper_bound(
        "tail_below_chi_square_bound_T" + std::to_string(static_cast<int>(mult * 10)), worst, 0.0,
        bound, 0.0, "empirical tail integral below sqrt(2 pi d) exp(-(sqrt(T^2-2d^2)-sqrt(2)d)^2/(8d))"));
    ++row_idx;
  }

  if (trials) {
    add_column(trials, "t_thresh", t_col);
    add_column(trials, "tail_integral", tail_col);
    add_column(trials, "bound", bound_col);
  }
}

}  // namespace

Report run_experiment(const LabConfig& raw_cfg, TrialTable* trials) {
  LabConfig cfg = raw_cfg;
  resolve_defaults(cfg);

  Report rep;
  rep.experiment_id = cfg.experiment_id;
  rep.config = cfg;

  const auto start = std::chrono::steady_clock::now();
  if (cfg.experiment_id == "lemma32_equality") {
    run_lemma32(cfg, rep, trials);
  } else if (cfg.experiment_id == "lemma33_moments") {
    run_lemma33(cfg, rep, trials);
  } else if (cfg.experiment_id == "thm35_terms") {
    run_thm35(cfg, rep, trials);
  } else if (cfg.experiment_id == "covsamp_invariants") {
    run_covsamp(cfg, rep, trials);
  } else if (cfg.experiment_id == "fourth_moment_identity") {
    run_fourth_moment(cfg, rep, trials);
  } else if (cfg.experiment_id == "reduction_factor32") {
    run_reduction32(cfg, rep, trials);
  } else if (cfg.experiment_id == "heavy_tailed_assouad") {
    run_heavy_tailed(cfg, rep, trials);
  } else if (cfg.experiment_id == "concentration_suite") {
    run_concentration(cfg, rep, trials);
  } else if (cfg.experiment_id == "appendixC_product") {
    run_appendix_product(cfg, rep, trials);
  } else if (cfg.experiment_id == "appendixC_gaussmean") {
    run_appendix_gaussmean(cfg, rep, trials);
  } else {
    throw ConfigError("unknown experiment_id '" + cfg.experiment_id + "'");
  }
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace fplab::lab
