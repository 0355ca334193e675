#pragma once

#include <cstdint>

#include "fplab/dataset.hpp"
#include "fplab/linalg.hpp"
#include "fplab/rng.hpp"

namespace fplab::hard {

// Axis-aligned hyper-rectangle prior over natural parameters. Degenerate
// coordinates (lo_j == hi_j) are kept explicitly; they carry zero width and
// contribute nothing downstream.
class PriorBox {
 public:
  PriorBox(Vec lo, Vec hi);  // requires lo <= hi componentwise

  int dim() const { return static_cast<int>(lo_.size()); }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

  Vec width() const;     // R = hi - lo
  Vec midpoint() const;  // m = (lo + hi) / 2
  double width_sq_norm() const;   // |R|^2
  double width_inf_norm() const;  // max_j R_j
  bool degenerate(int j) const { return lo_[j] == hi_[j]; }
  bool contains(const Vec& eta, double tol = 1e-12) const;

  Vec sample_eta(Rng& rng) const;  // independent uniforms, one per coordinate

 private:
  Vec lo_, hi_;
};

// Output of the precision-box covariance sampler: a covariance matrix with
// I <= Sigma <= 2I, its upper-triangular natural parameter vector, and the
// prior box the parameter coordinates were drawn from (sub-diagonal
// coordinates are degenerate at zero).
struct CovInstance {
  linalg::Mat sigma;
  Vec eta0;  // length d^2
  PriorBox box;
};

// Draws the precision matrix entrywise: diagonal uniform on
// [3/4 - 1/(4d), 3/4 + 1/(4d)], above-diagonal uniform on [-1/(4d), 1/(4d)]
// and mirrored. eta0 is twice the flattened upper-triangular half (diagonal
// halved), so its coordinates are independent.
CovInstance cov_samp(int d, Rng& rng);

// The box cov_samp draws from, as a function of d alone.
PriorBox cov_prior_box(int d);

PriorBox product_prior(int d);        // [-ln 2, ln 2]^d
PriorBox gaussian_mean_prior(int d);  // [-1, 1]^d

// Spiked coordinate distribution: each coordinate is sign_v[i] * spike_t with
// probability spike_p, else 0. Second moment in any unit direction is
// spike_p (1 - spike_p) spike_t^2, at most spike_p spike_t^2.
struct HeavyTailedSpec {
  Vec sign_v;     // entries +-1
  double spike_t = 0.0;
  double spike_p = 0.0;

  HeavyTailedSpec(Vec sign_v, double spike_t, double spike_p);  // validates p t^2 <= 1
  int dim() const { return static_cast<int>(sign_v.size()); }
  double mean_coord(int i) const { return spike_p * spike_t * sign_v[i]; }
  double direction_second_moment() const { return spike_p * (1.0 - spike_p) * spike_t * spike_t; }
};

// p = 2 alpha^2 / d and t = sqrt(d) / (sqrt(2) alpha), the choice that makes
// p t^2 = 1 exactly.
HeavyTailedSpec default_heavy_spec(Vec sign_v, double alpha);

Dataset heavy_sample(const HeavyTailedSpec& spec, int n, Rng& rng);

// Coupled pair of datasets differing only in coordinate `coord`: Y flips the
// sign of that coordinate on rows where it is nonzero. hamming counts the
// differing rows; its expectation is n * spike_p.
struct Coupling {
  Dataset x;
  Dataset y;
  std::int64_t hamming = 0;
};

// X is drawn from the +coord mixture: a sign pattern e with e[coord] = +1 is
// drawn uniformly, then n rows from that spiked distribution.
Coupling assouad_coupling(const HeavyTailedSpec& spec, int coord, int n, Rng& rng);

}  // namespace fplab::hard
