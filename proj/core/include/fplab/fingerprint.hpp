#pragma once

#include <cstdint>
#include <vector>

#include "fplab/expfam.hpp"
#include "fplab/hard_instances.hpp"
#include "fplab/linalg.hpp"
#include "fplab/mechanisms.hpp"
#include "fplab/rng.hpp"
#include "fplab/stats.hpp"

namespace fplab::fp {

// Correlation statistics between a deviation estimate a and the sufficient
// statistics of the samples:
//   z_ij = [R_j^2/4 - (eta_j - m_j)^2] [a_j - (eta_j - m_j)] (T_j(X_i) - mu_{T,j})
// with row sums z_i, column sums z_j, and grand total. Degenerate box
// coordinates contribute exactly zero.
struct CorrStats {
  linalg::Mat z_ij;  // n x k
  Vec z_i;           // length n
  Vec z_j;           // length k
  double z_total = 0.0;
};

CorrStats corr_stats(const expfam::ExpFamilyModel& model, const hard::PriorBox& box,
                     const Vec& eta, const Dataset& x, const Vec& a);

// Monte Carlo estimate of E[Z + |a - (eta - m)|^2] with eta drawn uniformly
// from the box, X from the model, and the mechanism applied per trial. The
// data-independent midpoint mechanism attains E[Z] = 0 and MSE = |R|^2 / 12;
// every mechanism satisfies lhs >= |R|^2 / 12 up to Monte Carlo error.
struct FingerprintLhs {
  stats::MeanSE lhs;   // Z + squared error
  stats::MeanSE ez;    // Z alone
  stats::MeanSE mse;   // squared error alone
  std::vector<double> z_per_trial;
  std::vector<double> err2_per_trial;
};

FingerprintLhs fingerprint_lhs(const expfam::ExpFamilyModel& model, const hard::PriorBox& box,
                               const mech::BoxMechanism& mechanism, int n, std::int64_t trials,
                               Stream stream, int workers = 1);

// s_j = [R_j^2/4 - (eta_j - m_j)^2] [a_j - (eta_j - m_j)], the correlation
// proxy built from an estimate computed on a neighboring dataset.
Vec s_vector(const hard::PriorBox& box, const Vec& eta, const Vec& a_resampled);

// Moments of z~ = <s, T(X_i) - mu_T> at fixed eta: the mean is zero and the
// variance matches E[s^T Cov[T] s], estimated here both empirically and
// through the closed-form quadratic form.
struct ZtildeMoments {
  stats::MeanSE mean;       // empirical mean of z~
  double variance = 0.0;    // empirical variance of z~
  stats::MeanSE var_gap;    // mean of z~^2 - s^T Cov[T] s, zero in expectation
  stats::MeanSE sts;        // closed-form s^T Cov[T] s across trials
  std::vector<double> ztilde_per_trial;
  std::vector<double> sts_per_trial;
};

ZtildeMoments ztilde_moments(const expfam::ExpFamilyModel& model, const hard::PriorBox& box,
                             const Vec& eta, const mech::BoxMechanism& mechanism, int n,
                             int replace_index, std::int64_t trials, Stream stream,
                             int workers = 1);

// Scaled deviation of the sufficient statistics; the tail integrand variable.
// W = |T(X) - mu_T| * |R|_inf^3 sqrt(k) / 4, so the correlation tail integral
// becomes int_T P[W > t] dt.
std::vector<double> tail_weight_samples(const expfam::ExpFamilyModel& model, const Vec& eta,
                                        const hard::PriorBox& box, std::int64_t n_mc, Rng& rng);

// Integral of the empirical survival function of w from t_thresh upward;
// equals mean((w - t_thresh)+), and mean(w) at t_thresh = 0.
double survival_integral(const std::vector<double>& w, double t_thresh);

double tail_integral(const expfam::ExpFamilyModel& model, const Vec& eta,
                     const hard::PriorBox& box, double t_thresh, std::int64_t n_mc, Rng& rng);

// Per-sample correlation budget of an (eps, delta)-DP mechanism and the
// lower-bound assembly around it:
//   per-sample budget = 2 delta T + 2 eps E_eta sqrt(E[s^T Cov[T] s]) + 2 E_eta[tail]
// against the requirement n * budget >= |R|^2 / 24 for mechanisms with
// MSE <= |R|^2 / 24.
struct TheoremTerms {
  double term_delta = 0.0;      // 2 delta T
  stats::MeanSE term_eps;       // 2 eps * mean over eta of sqrt(inner mean)
  stats::MeanSE term_tail;      // 2 * mean over eta of the tail integral
  double term_eps_max = 0.0;    // worst sampled eta variant of term_eps
  double rhs = 0.0;             // |R|^2 / 24
  double implied_n_bound = 0.0; // |R|^2 / (96 eps E sqrt(...)); 48 when delta = 0
  stats::MeanSE sts;            // pooled E[s^T Cov[T] s]
  stats::MeanSE mse;            // pooled mechanism squared error
  stats::MeanSE per_sample_corr;  // pooled E[Z_i] = E[Z] / n; the quantity the
                                  // budget caps for DP mechanisms, and the
                                  // probe non-private estimators can exceed
  double max_tail_weight = 0.0;   // largest W observed; the empirical tail
                                  // integral truncates here
  std::int64_t outer_trials = 0;
  std::int64_t inner_trials = 0;
  std::vector<double> sts_per_trial;
  std::vector<double> err2_per_trial;
  std::vector<double> z_per_trial;

  double per_sample_budget() const { return term_delta + term_eps.mean + term_tail.mean; }
  bool inequality_holds(std::int64_t n) const {
    return static_cast<double>(n) * per_sample_budget() >= rhs;
  }
};

TheoremTerms theorem_terms(const expfam::ExpFamilyModel& model, const hard::PriorBox& box,
                           const mech::BoxMechanism& mechanism, int n, double t_thresh,
                           double eps, double delta, std::int64_t outer_trials,
                           std::int64_t inner_trials, std::int64_t tail_mc, Stream stream,
                           int workers = 1);

// Threshold recipes and closed-form tail bounds for the built-in instances.
// The covariance forms assume the |R|_inf = 1/d scaling of the precision box,
// which holds for d >= 2 (at d = 1 the box has no off-diagonal coordinates
// and the engine's weight scale differs).
double cov_tail_threshold(int d, double delta);
double cov_tail_bound(int d, double t_thresh);           // requires t_thresh >= 1/(3 d^2)
double product_tail_threshold(int d);                    // (4/3) ln^3(2) d; tail vanishes beyond
double gauss_mean_tail_threshold(int d, double delta);
double gauss_mean_tail_bound(int d, double t_thresh);    // requires t_thresh >= 2 d

}  // namespace fplab::fp
