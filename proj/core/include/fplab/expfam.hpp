#pragma once

#include <span>
#include <string>

#include "fplab/dataset.hpp"
#include "fplab/linalg.hpp"
#include "fplab/rng.hpp"

namespace fplab::expfam {

enum class FamilyId {
  bernoulli_product,
  gaussian_mean,
  gaussian_covariance,
};

std::string family_name(FamilyId id);

struct SuffStatsMoments {
  Vec mu_t;           // E[T(X)]
  linalg::Mat sigma_t;  // Cov[T(X)], symmetric PSD
};

struct MgfResidual {
  double residual = 0.0;  // |MC mean of exp(<s,T>) - exp(Z(eta+s) - Z(eta))|
  double se = 0.0;        // standard error of the MC mean (0 when evaluated exactly)
  bool exact = false;
};

// One of three natural exponential families, identified by the density
// h(x) exp(<eta, T(x)> - Z(eta)):
//
//   bernoulli_product    d coords on {0,1}, T(x) = x, Z = sum_j ln(1 + e^eta_j)
//   gaussian_mean        N(eta, I) on R^d,  T(x) = x, Z = |eta|^2 / 2
//   gaussian_covariance  N(0, Sigma) on R^d, T(x) = -1/2 flatten(x x^T),
//                        k = d^2, Sigma^{-1} = (eta^# + (eta^#)^T) / 2,
//                        Z = d/2 ln(2 pi) - 1/2 ln det Sigma^{-1}
//
// The covariance family accepts any eta whose symmetrized unflattening is
// positive definite. Upper-triangular parameter vectors (2 U flattened) and
// symmetric ones (the precision matrix flattened) describe the same
// distribution and give the same log-partition value.
//
// Instances are immutable; every member is safe to call concurrently.
class ExpFamilyModel {
 public:
  static ExpFamilyModel bernoulli_product(int d);
  static ExpFamilyModel gaussian_mean(int d);
  static ExpFamilyModel gaussian_covariance(int d);

  FamilyId family() const { return family_; }
  int sample_dim() const { return sample_dim_; }
  int param_dim() const { return param_dim_; }

  Vec suff_stats(std::span<const double> x) const;
  double log_carrier(std::span<const double> x) const;

  bool in_natural_range(const Vec& eta) const;
  double log_partition(const Vec& eta) const;  // domain_error outside the range

  Vec mean_suff_stats(const Vec& eta) const;
  SuffStatsMoments moments(const Vec& eta) const;

  // s^T Cov[T] s without materializing the k x k covariance; for the
  // covariance family this is the quadratic-form route
  //   1/4 ( <s^#, Sigma s^# Sigma> + <s^#, Sigma (s^#)^T Sigma> ).
  double suff_stat_quadform(const Vec& eta, const Vec& s) const;

  // Column sums sum_i T(X_i); what the correlation statistics consume.
  Vec suff_stat_sum(const Dataset& x) const;

  // gaussian_covariance only: Sigma = (symmetrized eta^#)^{-1}.
  linalg::Mat covariance_from_eta(const Vec& eta) const;

  Dataset sample(const Vec& eta, int n, Rng& rng) const;

  // Checks Proposition-style MGF consistency: E[exp(<s, T(X)>)] against
  // exp(Z(eta+s) - Z(eta)). Exact two-point enumeration for the Bernoulli
  // family, Monte Carlo otherwise.
  MgfResidual mgf_residual(const Vec& eta, const Vec& shift, std::int64_t n_mc, Rng& rng) const;

 private:
  ExpFamilyModel(FamilyId family, int sample_dim, int param_dim)
      : family_(family), sample_dim_(sample_dim), param_dim_(param_dim) {}

  void require_param(const Vec& eta) const;

  FamilyId family_;
  int sample_dim_;
  int param_dim_;
};

}  // namespace fplab::expfam
