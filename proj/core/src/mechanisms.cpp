#include "fplab/mechanisms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fplab::mech {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void require_privacy_params(double eps, double delta) {
  if (!(eps > 0.0)) throw std::invalid_argument("privacy: eps must be positive");
  if (!(delta > 0.0) || !(delta < 1.0)) throw std::invalid_argument("privacy: delta must lie in (0, 1)");
}

// x scaled by min(1, clip/|x|); never increases the norm.
void clip_row(std::span<double> row, double clip) {
  const double norm = linalg::l2_norm(row);
  if (norm <= clip || norm == 0.0) return;
  const double scale = clip / norm;
  for (double& v : row) v *= scale;
}

// Floored inverse used only for the support projection: the result is clamped
// entrywise afterwards, so flooring (rather than failing) is safe here.
linalg::Mat floored_sym_inverse(const linalg::Mat& a, double floor) {
  const linalg::SymEig e = linalg::eig_sym(a, 1e-8);
  const int d = a.rows();
  linalg::Mat out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) {
        acc += e.vectors(i, k) * e.vectors(j, k) / std::max(e.values[k], floor);
      }
      out(i, j) = acc;
      out(j, i) = acc;
    }
  return out;
}

}  // namespace

linalg::Mat empirical_covariance(const Dataset& x) {
  if (x.n < 1) throw std::invalid_argument("empirical_covariance: dataset is empty");
  const int d = x.dim;
  linalg::Mat out(d, d);
  for (int i = 0; i < x.n; ++i) {
    const auto row = x.row(i);
    for (int a = 0; a < d; ++a) {
      const double xa = row[a];
      for (int b = a; b < d; ++b) out(a, b) += xa * row[b];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(x.n);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      out(a, b) *= inv_n;
      out(b, a) = out(a, b);
    }
  return out;
}

double gaussian_noise_scale(double sensitivity, double eps, double delta) {
  require_privacy_params(eps, delta);
  if (!(sensitivity >= 0.0)) throw std::invalid_argument("gaussian_noise_scale: bad sensitivity");
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / eps;
}

linalg::Mat gauss_mech_covariance(const Dataset& x, double eps, double delta, double clip, Rng& rng) {
  require_privacy_params(eps, delta);
  if (!(clip > 0.0)) throw std::invalid_argument("gauss_mech_covariance: clip must be positive");
  if (x.n < 1) throw std::invalid_argument("gauss_mech_covariance: dataset is empty");

  Dataset clipped = x;
  for (int i = 0; i < clipped.n; ++i) clip_row(clipped.row(i), clip);
  linalg::Mat out = empirical_covariance(clipped);

  const double sigma = gaussian_noise_scale(2.0 * clip * clip / x.n, eps, delta);
  for (int a = 0; a < out.rows(); ++a)
    for (int b = a; b < out.cols(); ++b) {
      const double noise = sigma * rng.normal();
      out(a, b) += noise;
      if (b != a) out(b, a) += noise;
    }
  return out;
}

Vec gauss_mech_mean(const Dataset& x, double eps, double delta, double clip, Rng& rng) {
  require_privacy_params(eps, delta);
  if (!(clip > 0.0)) throw std::invalid_argument("gauss_mech_mean: clip must be positive");
  if (x.n < 1) throw std::invalid_argument("gauss_mech_mean: dataset is empty");

  Vec mean(x.dim, 0.0);
  Vec row_buf;
  for (int i = 0; i < x.n; ++i) {
    row_buf.assign(x.row(i).begin(), x.row(i).end());
    clip_row(row_buf, clip);
    for (int j = 0; j < x.dim; ++j) mean[j] += row_buf[j];
  }
  const double sigma = gaussian_noise_scale(2.0 * clip / x.n, eps, delta);
  for (int j = 0; j < x.dim; ++j) {
    mean[j] = mean[j] / x.n + sigma * rng.normal();
  }
  return mean;
}

Estimate nat_param_est(const linalg::Mat& sigma_hat, int d, const Vec& m) {
  if (!sigma_hat.square() || sigma_hat.rows() != d) {
    throw std::invalid_argument("nat_param_est: estimate has wrong shape");
  }
  if (static_cast<int>(m.size()) != d * d) {
    throw std::invalid_argument("nat_param_est: midpoint has wrong length");
  }
  if (!linalg::is_symmetric(sigma_hat, 1e-8)) {
    throw std::invalid_argument("nat_param_est: estimate must be symmetric");
  }

  const double half = 1.0 / (4.0 * d);
  linalg::Mat prec = floored_sym_inverse(sigma_hat, 1e-8);
  for (int i = 0; i < d; ++i) {
    prec(i, i) = clamp(prec(i, i), 0.75 - half, 0.75 + half);
    for (int j = i + 1; j < d; ++j) {
      const double v = clamp(0.5 * (prec(i, j) + prec(j, i)), -half, half);
      prec(i, j) = v;
      prec(j, i) = v;
    }
  }

  // eta0 = 2 * flatten(upper half with halved diagonal); deviation from m.
  Estimate out;
  out.kind = EstimateKind::nat_param_deviation;
  out.value.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    out.value[static_cast<std::size_t>(i) * d + i] = prec(i, i) - m[static_cast<std::size_t>(i) * d + i];
    for (int j = i + 1; j < d; ++j) {
      out.value[static_cast<std::size_t>(i) * d + j] = 2.0 * prec(i, j) - m[static_cast<std::size_t>(i) * d + j];
    }
  }
  return out;
}

Estimate logit_reduction(const Vec& p_hat) {
  Estimate out;
  out.kind = EstimateKind::nat_param_deviation;
  out.value.resize(p_hat.size());
  const double ln2 = std::log(2.0);
  for (std::size_t j = 0; j < p_hat.size(); ++j) {
    double p = p_hat[j];
    if (p < 1.0 / 3.0 || p > 2.0 / 3.0) {
      p = clamp(p, 1.0 / 3.0, 2.0 / 3.0);
      out.clamped = true;
    }
    out.value[j] = clamp(std::log((1.0 - p) / p), -ln2, ln2);
  }
  return out;
}

Estimate constant_mech(const hard::PriorBox& box) {
  Estimate out;
  out.kind = EstimateKind::nat_param_deviation;
  out.value.assign(box.dim(), 0.0);
  return out;
}

BoxMechanism make_constant(const hard::PriorBox& box) {
  BoxMechanism mech;
  mech.spec = {"constant", 0.0, 0.0, 0.0, "prior-box deviations"};
  const int k = box.dim();
  mech.apply = [k](const Dataset&, Rng&) { return Vec(k, 0.0); };
  return mech;
}

BoxMechanism make_plugin(const expfam::ExpFamilyModel& model, const hard::PriorBox& box) {
  using expfam::FamilyId;
  BoxMechanism mech;
  mech.spec = {"plugin", kInf, 0.0, 0.0, "prior-box deviations"};
  const Vec lo = box.lo();
  const Vec hi = box.hi();
  const Vec mid = box.midpoint();

  switch (model.family()) {
    case FamilyId::gaussian_mean:
      mech.apply = [lo, hi, mid](const Dataset& x, Rng&) {
        if (x.n < 1) throw std::invalid_argument("plugin: dataset is empty");
        Vec a(x.dim, 0.0);
        for (int i = 0; i < x.n; ++i) {
          const auto row = x.row(i);
          for (int j = 0; j < x.dim; ++j) a[j] += row[j];
        }
        for (int j = 0; j < x.dim; ++j) {
          a[j] = clamp(a[j] / x.n, lo[j], hi[j]) - mid[j];
        }
        return a;
      };
      return mech;
    case FamilyId::bernoulli_product:
      // The logit map consumes the zero frequency, which fixes the sign
      // convention: it recovers eta with P(X=1) = e^eta / (1 + e^eta).
      mech.apply = [lo, hi, mid](const Dataset& x, Rng&) {
        if (x.n < 1) throw std::invalid_argument("plugin: dataset is empty");
        Vec zero_freq(x.dim, 0.0);
        for (int i = 0; i < x.n; ++i) {
          const auto row = x.row(i);
          for (int j = 0; j < x.dim; ++j) zero_freq[j] += (row[j] == 0.0) ? 1.0 : 0.0;
        }
        for (int j = 0; j < x.dim; ++j) zero_freq[j] /= x.n;
        Vec a = logit_reduction(zero_freq).value;
        for (std::size_t j = 0; j < a.size(); ++j) a[j] = clamp(a[j], lo[j], hi[j]) - mid[j];
        return a;
      };
      return mech;
    case FamilyId::gaussian_covariance: {
      const int d = model.sample_dim();
      mech.apply = [d, mid](const Dataset& x, Rng&) {
        return nat_param_est(empirical_covariance(x), d, mid).value;
      };
      return mech;
    }
  }
  throw std::logic_error("make_plugin: unreachable");
}

BoxMechanism make_dp_covariance(int d, double eps, double delta, double clip) {
  require_privacy_params(eps, delta);
  BoxMechanism mech;
  mech.spec = {"dp_gauss_cov", eps, delta, clip, "prior-box deviations"};
  const Vec mid = hard::cov_prior_box(d).midpoint();
  mech.apply = [d, eps, delta, clip, mid](const Dataset& x, Rng& rng) {
    return nat_param_est(gauss_mech_covariance(x, eps, delta, clip, rng), d, mid).value;
  };
  return mech;
}

BoxMechanism make_dp_mean(const hard::PriorBox& box, double eps, double delta, double clip) {
  require_privacy_params(eps, delta);
  BoxMechanism mech;
  mech.spec = {"dp_gauss_mean", eps, delta, clip, "prior-box deviations"};
  const Vec lo = box.lo();
  const Vec hi = box.hi();
  const Vec mid = box.midpoint();
  mech.apply = [lo, hi, mid, eps, delta, clip](const Dataset& x, Rng& rng) {
    Vec a = gauss_mech_mean(x, eps, delta, clip, rng);
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = clamp(a[j], lo[j], hi[j]) - mid[j];
    return a;
  };
  return mech;
}

}  // namespace fplab::mech
