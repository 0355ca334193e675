#include "fplab/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fplab/concentration.hpp"
#include "fplab/parallel.hpp"

namespace fplab::fp {

namespace {

void require_eta_in_box(const hard::PriorBox& box, const Vec& eta) {
  if (!box.contains(eta, 1e-9)) {
    throw std::invalid_argument("fingerprint: eta lies outside the prior box");
  }
}

void require_deviation_in_box(const hard::PriorBox& box, const Vec& a) {
  if (a.size() != static_cast<std::size_t>(box.dim())) {
    throw std::invalid_argument("fingerprint: estimate has wrong length");
  }
  const Vec r = box.width();
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (std::abs(a[j]) > 0.5 * r[j] + 1e-9) {
      std::ostringstream os;
      os << "fingerprint: estimate coordinate " << j << " = " << a[j]
         << " outside [-R/2, R/2] with R = " << r[j];
      throw std::invalid_argument(os.str());
    }
  }
}

// Scaling that turns the correlation tail event into {W > t}.
double tail_weight_scale(const hard::PriorBox& box) {
  const double r_inf = box.width_inf_norm();
  return 0.25 * r_inf * r_inf * r_inf * std::sqrt(static_cast<double>(box.dim()));
}

double pairwise_mean(std::span<const double> x) {
  return x.empty() ? 0.0 : stats::pairwise_sum(x) / static_cast<double>(x.size());
}

}  // namespace

CorrStats corr_stats(const expfam::ExpFamilyModel& model, const hard::PriorBox& box,
                     const Vec& eta, const Dataset& x, const Vec& a) {
  require_eta_in_box(box, eta);
  require_deviation_in_box(box, a);
  const int k = box.dim();
  if (model.param_dim() != k) throw std::invalid_argument("corr_stats: box/model dimension mismatch");

  const Vec m = box.midpoint();
  const Vec r = box.width();
  const Vec mu = model.mean_suff_stats(eta);

  CorrStats out;
  out.z_ij = linalg::Mat(std::max(x.n, 1), k);
  out.z_i.assign(x.n, 0.0);
  out.z_j.assign(k, 0.0);

  Vec factor(k);
  for (int j = 0; j < k; ++j) {
    const double u = eta[j] - m[j];
    factor[j] = (0.25 * r[j] * r[j] - u * u) * (a[j] - u);
  }

  for (int i = 0; i < x.n; ++i) {
    const Vec t = model.suff_stats(x.row(i));
    double row_sum = 0.0;
    for (int j = 0; j < k; ++j) {
      const double z = factor[j] * (t[j] - mu[j]);
      out.z_ij(i, j) = z;
      row_sum += z;
      out.z_j[j] += z;
    }
    out.z_i[i] = row_sum;
  }
  out.z_total = stats::pairwise_sum(out.z_i);
  return out;
}

FingerprintLhs fingerprint_lhs(const expfam::ExpFamilyModel& model, const hard::PriorBox& box,
                               const mech::BoxMechanism& mechanism, int n, std::int64_t trials,
                               Stream stream, int workers) {
  if (n < 1) throw std::invalid_argument("fingerprint_lhs: n must be positive");
  if (trials < 1) throw std::invalid_argument("fingerprint_lhs: trials must be positive");
  const int k = box.dim();
  if (model.param_dim() != k) throw std::invalid_argument("fingerprint_lhs: dimension mismatch");

  const Vec m = box.midpoint();
  const Vec r = box.width();

  FingerprintLhs out;
  out.z_per_trial.assign(static_cast<std::size_t>(trials), 0.0);
  out.err2_per_trial.assign(static_cast<std::size_t>(trials), 0.0);

  parallel_for(trials, workers, [&](std::int64_t t) {
    Rng rng = stream.child(static_cast<std::uint64_t>(t)).rng();
    const Vec eta = box.sample_eta(rng);
    const Dataset x = model.sample(eta, n, rng);
    const Vec a = mechanism.apply(x, rng);
    require_deviation_in_box(box, a);

    const Vec mu = model.mean_suff_stats(eta);
    const Vec t_sum = model.suff_stat_sum(x);

    double z = 0.0;
    double err2 = 0.0;
    for (int j = 0; j < k; ++j) {
      const double u = eta[j] - m[j];
      const double dev = a[j] - u;
      z += (0.25 * r[j] * r[j] - u * u) * dev * (t_sum[j] - n * mu[j]);
      err2 += dev * dev;
    }
    out.z_per_trial[static_cast<std::size_t>(t)] = z;
    out.err2_per_trial[static_cast<std::size_t>(t)] = err2;
  });

  std::vector<double> lhs(out.z_per_trial.size());
  for (std::size_t t = 0; t < lhs.size(); ++t) lhs[t] = out.z_per_trial[t] + out.err2_per_trial[t];
  out.lhs = stats::mean_se(lhs);
  out.ez = stats::mean_se(out.z_per_trial);
  out.mse = stats::mean_se(out.err2_per_trial);
  return out;
}

Vec s_vector(const hard::PriorBox& box, const Vec& eta, const Vec& a_resampled) {
  require_eta_in_box(box, eta);
  require_deviation_in_box(box, a_resampled);
  const Vec m = box.midpoint();
  const Vec r = box.width();
  Vec s(a_resampled.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double u = eta[j] - m[j];
    s[j] = (0.25 * r[j] * r[j] - u * u) * (a_resampled[j] - u);
  }
  return s;
}

ZtildeMoments ztilde_moments(const expfam::ExpFamilyModel& model, const hard::PriorBox& box,
                             const Vec& eta, const mech::BoxMechanism& mechanism, int n,
                             int replace_index, std::int64_t trials, Stream stream, int workers) {
  if (n < 1) throw std::invalid_argument("ztilde_moments: n must be positive");
  if (replace_index < 0 || replace_index >= n) {
    throw std::invalid_argument("ztilde_moments: replace_index out of range");
  }
  require_eta_in_box(box, eta);
  const Vec mu = model.mean_suff_stats(eta);

  ZtildeMoments out;
  out.ztilde_per_trial.assign(static_cast<std::size_t>(trials), 0.0);
  out.sts_per_trial.assign(static_cast<std::size_t>(trials), 0.0);

  parallel_for(trials, workers, [&](std::int64_t t) {
    Rng rng = stream.child(static_cast<std::uint64_t>(t)).rng();
    Dataset x = model.sample(eta, n, rng);
    const Vec t_kept = model.suff_stats(x.row(replace_index));

    // Neighbor: the kept row is replaced by a fresh draw before the
    // mechanism sees the data.
    const Dataset fresh = model.sample(eta, 1, rng);
    std::copy(fresh.row(0).begin(), fresh.row(0).end(), x.row(replace_index).begin());
    const Vec a = mechanism.apply(x, rng);

    const Vec s = s_vector(box, eta, a);
    double ztilde = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) ztilde += s[j] * (t_kept[j] - mu[j]);
    out.ztilde_per_trial[static_cast<std::size_t>(t)] = ztilde;
    out.sts_per_trial[static_cast<std::size_t>(t)] = model.suff_stat_quadform(eta, s);
  });

  out.mean = stats::mean_se(out.ztilde_per_trial);
  out.variance = stats::sample_variance(out.ztilde_per_trial);
  out.sts = stats::mean_se(out.sts_per_trial);
  std::vector<double> gap(out.ztilde_per_trial.size());
  for (std::size_t t = 0; t < gap.size(); ++t) {
    gap[t] = out.ztilde_per_trial[t] * out.ztilde_per_trial[t] - out.sts_per_trial[t];
  }
  out.var_gap = stats::mean_se(gap);
  return out;
}

std::vector<double> tail_weight_samples(const expfam::ExpFamilyModel& model, const Vec& eta,
                                        const hard::PriorBox& box, std::int64_t n_mc, Rng& rng) {
  if (n_mc < 1) throw std::invalid_argument("tail_weight_samples: n_mc must be positive");
  const double scale = tail_weight_scale(box);
  const Vec mu = model.mean_suff_stats(eta);
  std::vector<double> w(static_cast<std::size_t>(n_mc));
  const Dataset x = model.sample(eta, static_cast<int>(n_mc), rng);
  Vec diff(mu.size());
  for (std::int64_t i = 0; i < n_mc; ++i) {
    const Vec t = model.suff_stats(x.row(static_cast<int>(i)));
    for (std::size_t j = 0; j < mu.size(); ++j) diff[j] = t[j] - mu[j];
    w[static_cast<std::size_t>(i)] = scale * linalg::l2_norm(diff);
  }
  return w;
}

double survival_integral(const std::vector<double>& w, double t_thresh) {
  if (t_thresh < 0.0) throw std::invalid_argument("survival_integral: threshold must be non-negative");
  if (w.empty()) return 0.0;
  std::vector<double> excess(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) excess[i] = std::max(w[i] - t_thresh, 0.0);
  return stats::pairwise_sum(excess) / static_cast<double>(w.size());
}

double tail_integral(const expfam::ExpFamilyModel& model, const Vec& eta,
                     const hard::PriorBox& box, double t_thresh, std::int64_t n_mc, Rng& rng) {
  return survival_integral(tail_weight_samples(model, eta, box, n_mc, rng), t_thresh);
}

TheoremTerms theorem_terms(const expfam::ExpFamilyModel& model, const hard::PriorBox& box,
                           const mech::BoxMechanism& mechanism, int n, double t_thresh,
                           double eps, double delta, std::int64_t outer_trials,
                           std::int64_t inner_trials, std::int64_t tail_mc, Stream stream,
                           int workers) {
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("theorem_terms: eps must lie in [0, 1]");
  if (delta < 0.0) throw std::invalid_argument("theorem_terms: delta must be non-negative");
  if (!(t_thresh > 0.0)) throw std::invalid_argument("theorem_terms: threshold must be positive");
  if (outer_trials < 1 || inner_trials < 1) {
    throw std::invalid_argument("theorem_terms: trial counts must be positive");
  }

  const Vec m = box.midpoint();
  const std::size_t total = static_cast<std::size_t>(outer_trials * inner_trials);

  TheoremTerms out;
  out.outer_trials = outer_trials;
  out.inner_trials = inner_trials;
  out.rhs = box.width_sq_norm() / 24.0;
  out.term_delta = 2.0 * delta * t_thresh;
  out.sts_per_trial.assign(total, 0.0);
  out.err2_per_trial.assign(total, 0.0);
  out.z_per_trial.assign(total, 0.0);

  std::vector<double> sqrt_inner(static_cast<std::size_t>(outer_trials), 0.0);
  std::vector<double> tails(static_cast<std::size_t>(outer_trials), 0.0);
  std::vector<double> max_w(static_cast<std::size_t>(outer_trials), 0.0);

  parallel_for(outer_trials, workers, [&](std::int64_t o) {
    const Stream outer_stream = stream.child(static_cast<std::uint64_t>(o));
    Rng eta_rng = outer_stream.child(0).rng();
    const Vec eta = box.sample_eta(eta_rng);

    const Vec mu = model.mean_suff_stats(eta);
    const std::size_t base = static_cast<std::size_t>(o * inner_trials);
    for (std::int64_t i = 0; i < inner_trials; ++i) {
      Rng rng = outer_stream.child(2 + static_cast<std::uint64_t>(i)).rng();
      const Dataset x = model.sample(eta, n, rng);
      const Vec a = mechanism.apply(x, rng);
      const Vec s = s_vector(box, eta, a);
      out.sts_per_trial[base + static_cast<std::size_t>(i)] = model.suff_stat_quadform(eta, s);

      // s_j already carries [R_j^2/4 - u_j^2][a_j - u_j]; contracting it with
      // the centered statistic sums gives the total correlation Z on the same
      // dataset the mechanism saw.
      const Vec t_sum = model.suff_stat_sum(x);
      double z = 0.0;
      double err2 = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        const double dev = a[j] - (eta[j] - m[j]);
        z += s[j] * (t_sum[j] - n * mu[j]);
        err2 += dev * dev;
      }
      out.z_per_trial[base + static_cast<std::size_t>(i)] = z;
      out.err2_per_trial[base + static_cast<std::size_t>(i)] = err2;
    }
    const double inner_mean = pairwise_mean(
        std::span<const double>(out.sts_per_trial).subspan(base, static_cast<std::size_t>(inner_trials)));
    sqrt_inner[static_cast<std::size_t>(o)] = std::sqrt(std::max(inner_mean, 0.0));

    if (tail_mc > 0) {
      Rng tail_rng = outer_stream.child(1).rng();
      const auto w = tail_weight_samples(model, eta, box, tail_mc, tail_rng);
      tails[static_cast<std::size_t>(o)] = survival_integral(w, t_thresh);
      max_w[static_cast<std::size_t>(o)] = *std::max_element(w.begin(), w.end());
    }
  });

  const auto sqrt_stats = stats::mean_se(sqrt_inner);
  out.term_eps = {2.0 * eps * sqrt_stats.mean, 2.0 * eps * sqrt_stats.se, sqrt_stats.count};
  out.term_eps_max = 2.0 * eps * *std::max_element(sqrt_inner.begin(), sqrt_inner.end());
  const auto tail_stats = stats::mean_se(tails);
  out.term_tail = {2.0 * tail_stats.mean, 2.0 * tail_stats.se, tail_stats.count};
  out.sts = stats::mean_se(out.sts_per_trial);
  out.mse = stats::mean_se(out.err2_per_trial);
  const auto z_stats = stats::mean_se(out.z_per_trial);
  out.per_sample_corr = {z_stats.mean / n, z_stats.se / n, z_stats.count};
  out.max_tail_weight = *std::max_element(max_w.begin(), max_w.end());

  // Recipe: once the delta and tail terms are dominated, the budget reduces
  // to the eps term with constant 96 (48 when delta = 0 and no threshold
  // split is needed).
  const double factor = (delta == 0.0) ? 48.0 : 96.0;
  const double denom = factor * eps * sqrt_stats.mean;
  out.implied_n_bound =
      denom > 0.0 ? box.width_sq_norm() / denom : std::numeric_limits<double>::infinity();
  return out;
}

double cov_tail_threshold(int d, double delta) {
  if (d < 1) throw std::invalid_argument("cov_tail_threshold: d must be positive");
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("cov_tail_threshold: delta must lie in (0, 1)");
  }
  const double d2 = static_cast<double>(d) * d;
  return (2.0 * std::log(3.0) + std::log(1.0 / delta) / d2) / (3.0 * kHansonWrightConst);
}

double cov_tail_bound(int d, double t_thresh) {
  if (d < 1) throw std::invalid_argument("cov_tail_bound: d must be positive");
  const double d2 = static_cast<double>(d) * d;
  if (!(t_thresh >= 1.0 / (3.0 * d2))) {
    throw std::invalid_argument("cov_tail_bound: requires t >= 1/(3 d^2)");
  }
  const double c = kHansonWrightConst;
  return 2.0 / (3.0 * c * d2) * std::exp(-d2 * (3.0 * c * t_thresh - 2.0 * std::log(3.0)));
}

double product_tail_threshold(int d) {
  if (d < 1) throw std::invalid_argument("product_tail_threshold: d must be positive");
  const double l = std::log(2.0);
  return 4.0 * l * l * l * static_cast<double>(d) / 3.0;
}

double gauss_mean_tail_threshold(int d, double delta) {
  if (d < 1) throw std::invalid_argument("gauss_mean_tail_threshold: d must be positive");
  if (!(delta > 0.0) || !(delta <= 1.0)) {
    throw std::invalid_argument("gauss_mean_tail_threshold: delta must lie in (0, 1]");
  }
  const double l = std::log(1.0 / delta);
  const double inner = std::sqrt(l) + std::sqrt(static_cast<double>(d));
  return 2.0 * std::sqrt(static_cast<double>(d)) * std::sqrt(l + inner * inner);
}

double gauss_mean_tail_bound(int d, double t_thresh) {
  if (d < 1) throw std::invalid_argument("gauss_mean_tail_bound: d must be positive");
  const double dd = static_cast<double>(d);
  if (!(t_thresh >= 2.0 * dd)) throw std::invalid_argument("gauss_mean_tail_bound: requires t >= 2d");
  const double root = std::sqrt(t_thresh * t_thresh - 2.0 * dd * dd) - std::sqrt(2.0) * dd;
  return std::sqrt(2.0 * M_PI * dd) * std::exp(-root * root / (8.0 * dd));
}

}  // namespace fplab::fp
