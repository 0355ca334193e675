#pragma once

#include <functional>
#include <string>

#include "fplab/dataset.hpp"
#include "fplab/expfam.hpp"
#include "fplab/hard_instances.hpp"
#include "fplab/linalg.hpp"
#include "fplab/rng.hpp"

namespace fplab::mech {

// Claimed privacy parameters and clipping of an estimator under test.
// eps = infinity marks a non-private estimator; data-independent mechanisms
// carry eps = 0, delta = 0.
struct MechanismSpec {
  std::string id;
  double eps = 0.0;
  double delta = 0.0;
  double clip = 0.0;          // 0 when not applicable
  std::string output_range;   // where outputs live after clamping
};

enum class EstimateKind { nat_param_deviation, covariance, mean };

struct Estimate {
  Vec value;
  EstimateKind kind = EstimateKind::nat_param_deviation;
  bool clamped = false;  // set when an input had to be pulled into range first
};

// (1/n) sum_i x_i x_i^T; symmetric PSD by construction.
linalg::Mat empirical_covariance(const Dataset& x);

// Noise scale of the analytic Gaussian mechanism.
double gaussian_noise_scale(double sensitivity, double eps, double delta);

// Rows rescaled to norm <= clip, second moment averaged, iid N(0, sigma^2)
// noise added on the upper triangle and mirrored; sigma calibrated to the
// replacement sensitivity 2 clip^2 / n of the clipped second moment.
linalg::Mat gauss_mech_covariance(const Dataset& x, double eps, double delta, double clip, Rng& rng);

// Same recipe for the mean, sensitivity 2 clip / n per coordinate.
Vec gauss_mech_mean(const Dataset& x, double eps, double delta, double clip, Rng& rng);

// Deviation estimate for the covariance instance: pulls the estimate onto the
// sampler's support by clamping in precision space (invert, symmetrize, clamp
// entries to the support intervals, invert back), then reads off twice the
// upper-triangular half minus the box midpoint. Output lies in the prior box
// componentwise.
Estimate nat_param_est(const linalg::Mat& sigma_hat, int d, const Vec& m);

// Componentwise map p -> ln((1 - p)/p) on [1/3, 2/3]^d, clamped into range
// first when needed (flagged); output clamped to [-ln 2, ln 2]^d.
Estimate logit_reduction(const Vec& p_hat);

// The data-independent probe: estimates the midpoint, i.e. zero deviation.
Estimate constant_mech(const hard::PriorBox& box);

// A deviation estimator under test: output lives in prod_j [-R_j/2, R_j/2].
struct BoxMechanism {
  MechanismSpec spec;
  std::function<Vec(const Dataset&, Rng&)> apply;
};

BoxMechanism make_constant(const hard::PriorBox& box);

// Clamped plug-in estimator for the given family: sample mean (clamped into
// the box) for gaussian_mean, zero-frequency logit for bernoulli_product,
// empirical covariance through nat_param_est for gaussian_covariance.
BoxMechanism make_plugin(const expfam::ExpFamilyModel& model, const hard::PriorBox& box);

// gauss_mech_covariance followed by nat_param_est; (eps, delta)-DP by
// post-processing.
BoxMechanism make_dp_covariance(int d, double eps, double delta, double clip);

// gauss_mech_mean clamped into the box, minus the midpoint.
BoxMechanism make_dp_mean(const hard::PriorBox& box, double eps, double delta, double clip);

}  // namespace fplab::mech
