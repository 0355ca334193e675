#include "fplab/expfam.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fplab/stats.hpp"

namespace fplab::expfam {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Smallest eigenvalue the symmetrized precision matrix may have; below this
// the parameter is treated as outside the natural range.
constexpr double kPrecisionFloor = 1e-10;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ln(1 + e^x) without overflow.
double log1p_exp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

linalg::Mat symmetrized_precision(const Vec& eta) {
  const linalg::Mat raw = linalg::unflatten(eta);
  const int d = raw.rows();
  linalg::Mat w(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) w(i, j) = 0.5 * (raw(i, j) + raw(j, i));
  return w;
}

}  // namespace

std::string family_name(FamilyId id) {
  switch (id) {
    case FamilyId::bernoulli_product: return "bernoulli_product";
    case FamilyId::gaussian_mean: return "gaussian_mean";
    case FamilyId::gaussian_covariance: return "gaussian_covariance";
  }
  return "unknown";
}

ExpFamilyModel ExpFamilyModel::bernoulli_product(int d) {
  if (d <= 0) throw std::invalid_argument("bernoulli_product: d must be positive");
  return ExpFamilyModel(FamilyId::bernoulli_product, d, d);
}

ExpFamilyModel ExpFamilyModel::gaussian_mean(int d) {
  if (d <= 0) throw std::invalid_argument("gaussian_mean: d must be positive");
  return ExpFamilyModel(FamilyId::gaussian_mean, d, d);
}

ExpFamilyModel ExpFamilyModel::gaussian_covariance(int d) {
  if (d <= 0) throw std::invalid_argument("gaussian_covariance: d must be positive");
  return ExpFamilyModel(FamilyId::gaussian_covariance, d, d * d);
}

void ExpFamilyModel::require_param(const Vec& eta) const {
  if (static_cast<int>(eta.size()) != param_dim_) {
    std::ostringstream os;
    os << family_name(family_) << ": parameter has length " << eta.size() << ", expected "
       << param_dim_;
    throw std::invalid_argument(os.str());
  }
}

Vec ExpFamilyModel::suff_stats(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != sample_dim_) {
    throw std::invalid_argument("suff_stats: sample has wrong dimension");
  }
  switch (family_) {
    case FamilyId::bernoulli_product:
    case FamilyId::gaussian_mean:
      return Vec(x.begin(), x.end());
    case FamilyId::gaussian_covariance: {
      const int d = sample_dim_;
      Vec t(static_cast<std::size_t>(d) * d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) t[static_cast<std::size_t>(i) * d + j] = -0.5 * x[i] * x[j];
      return t;
    }
  }
  throw std::logic_error("suff_stats: unreachable");
}

double ExpFamilyModel::log_carrier(std::span<const double> x) const {
  if (family_ == FamilyId::gaussian_mean) {
    return -0.5 * sample_dim_ * std::log(kTwoPi) - 0.5 * linalg::l2_norm_sq(x);
  }
  return 0.0;  // carrier is 1 for the other two families
}

bool ExpFamilyModel::in_natural_range(const Vec& eta) const {
  require_param(eta);
  for (double v : eta)
    if (!std::isfinite(v)) return false;
  if (family_ != FamilyId::gaussian_covariance) return true;
  const auto range = linalg::eig_range_symmetric(symmetrized_precision(eta));
  return range.first > kPrecisionFloor;
}

double ExpFamilyModel::log_partition(const Vec& eta) const {
  require_param(eta);
  switch (family_) {
    case FamilyId::bernoulli_product: {
      double z = 0.0;
      for (double v : eta) z += log1p_exp(v);
      return z;
    }
    case FamilyId::gaussian_mean:
      return 0.5 * linalg::l2_norm_sq(eta);
    case FamilyId::gaussian_covariance: {
      const linalg::Mat w = symmetrized_precision(eta);
      const linalg::SymEig e = linalg::eig_sym(w);
      double log_det = 0.0;
      for (double l : e.values) {
        if (l <= kPrecisionFloor) {
          std::ostringstream os;
          os << "log_partition: symmetrized precision eigenvalue " << l
             << " not above floor " << kPrecisionFloor;
          throw std::domain_error(os.str());
        }
        log_det += std::log(l);
      }
      return 0.5 * sample_dim_ * std::log(kTwoPi) - 0.5 * log_det;
    }
  }
  throw std::logic_error("log_partition: unreachable");
}

Vec ExpFamilyModel::mean_suff_stats(const Vec& eta) const {
  require_param(eta);
  switch (family_) {
    case FamilyId::bernoulli_product: {
      Vec mu(eta.size());
      for (std::size_t j = 0; j < eta.size(); ++j) mu[j] = sigmoid(eta[j]);
      return mu;
    }
    case FamilyId::gaussian_mean:
      return eta;
    case FamilyId::gaussian_covariance: {
      const linalg::Mat sigma = covariance_from_eta(eta);
      Vec mu = linalg::flatten(sigma);
      for (double& v : mu) v *= -0.5;
      return mu;
    }
  }
  throw std::logic_error("mean_suff_stats: unreachable");
}

SuffStatsMoments ExpFamilyModel::moments(const Vec& eta) const {
  SuffStatsMoments out;
  out.mu_t = mean_suff_stats(eta);
  switch (family_) {
    case FamilyId::bernoulli_product: {
      Vec var(eta.size());
      for (std::size_t j = 0; j < eta.size(); ++j) {
        const double p = sigmoid(eta[j]);
        var[j] = p * (1.0 - p);
      }
      out.sigma_t = linalg::Mat::diagonal(var);
      return out;
    }
    case FamilyId::gaussian_mean:
      out.sigma_t = linalg::Mat::identity(param_dim_);
      return out;
    case FamilyId::gaussian_covariance: {
      // Cov[T] = 1/4 (K + K P) with K = Sigma (x) Sigma and P the flat-index
      // transposition; quadratic forms agree with suff_stat_quadform.
      const int d = sample_dim_;
      const linalg::Mat sigma = covariance_from_eta(eta);
      const linalg::Mat kron = linalg::kronecker(sigma, sigma);
      const int k = d * d;
      linalg::Mat sigma_t(k, k);
      for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) {
          const int ci = c / d;
          const int cj = c % d;
          const int swapped = cj * d + ci;
          sigma_t(r, c) = 0.25 * (kron(r, c) + kron(r, swapped));
        }
      }
      out.sigma_t = std::move(sigma_t);
      return out;
    }
  }
  throw std::logic_error("moments: unreachable");
}

double ExpFamilyModel::suff_stat_quadform(const Vec& eta, const Vec& s) const {
  require_param(eta);
  if (s.size() != eta.size()) throw std::invalid_argument("suff_stat_quadform: size mismatch");
  switch (family_) {
    case FamilyId::bernoulli_product: {
      double acc = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        const double p = sigmoid(eta[j]);
        acc += p * (1.0 - p) * s[j] * s[j];
      }
      return acc;
    }
    case FamilyId::gaussian_mean:
      return linalg::l2_norm_sq(s);
    case FamilyId::gaussian_covariance: {
      const linalg::Mat sigma = covariance_from_eta(eta);
      const linalg::Mat sm = linalg::unflatten(s);
      const linalg::Mat a = sigma * sm * sigma;
      const linalg::Mat b = sigma * linalg::transpose(sm) * sigma;
      return 0.25 * (linalg::dot(sm.data(), a.data()) + linalg::dot(sm.data(), b.data()));
    }
  }
  throw std::logic_error("suff_stat_quadform: unreachable");
}

Vec ExpFamilyModel::suff_stat_sum(const Dataset& x) const {
  if (x.dim != sample_dim_) throw std::invalid_argument("suff_stat_sum: dimension mismatch");
  switch (family_) {
    case FamilyId::bernoulli_product:
    case FamilyId::gaussian_mean: {
      Vec sum(sample_dim_, 0.0);
      for (int i = 0; i < x.n; ++i) {
        const auto row = x.row(i);
        for (int j = 0; j < sample_dim_; ++j) sum[j] += row[j];
      }
      return sum;
    }
    case FamilyId::gaussian_covariance: {
      const int d = sample_dim_;
      Vec gram(static_cast<std::size_t>(d) * d, 0.0);
      for (int i = 0; i < x.n; ++i) {
        const auto row = x.row(i);
        for (int a = 0; a < d; ++a) {
          const double xa = row[a];
          for (int b = 0; b < d; ++b) gram[static_cast<std::size_t>(a) * d + b] += xa * row[b];
        }
      }
      for (double& v : gram) v *= -0.5;
      return gram;
    }
  }
  throw std::logic_error("suff_stat_sum: unreachable");
}

linalg::Mat ExpFamilyModel::covariance_from_eta(const Vec& eta) const {
  if (family_ != FamilyId::gaussian_covariance) {
    throw std::logic_error("covariance_from_eta: only defined for the covariance family");
  }
  require_param(eta);
  const linalg::Mat w = symmetrized_precision(eta);
  const linalg::SymEig e = linalg::eig_sym(w);
  if (e.values.front() <= kPrecisionFloor) {
    std::ostringstream os;
    os << "covariance_from_eta: precision eigenvalue " << e.values.front()
       << " not above floor " << kPrecisionFloor;
    throw std::domain_error(os.str());
  }
  const int d = sample_dim_;
  linalg::Mat sigma(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += e.vectors(i, k) * e.vectors(j, k) / e.values[k];
      sigma(i, j) = acc;
      sigma(j, i) = acc;
    }
  return sigma;
}

Dataset ExpFamilyModel::sample(const Vec& eta, int n, Rng& rng) const {
  require_param(eta);
  if (n < 0) throw std::invalid_argument("sample: n must be non-negative");
  Dataset out(n, sample_dim_);
  switch (family_) {
    case FamilyId::bernoulli_product: {
      Vec p(eta.size());
      for (std::size_t j = 0; j < eta.size(); ++j) p[j] = sigmoid(eta[j]);
      for (int i = 0; i < n; ++i) {
        auto row = out.row(i);
        for (int j = 0; j < sample_dim_; ++j) row[j] = rng.bernoulli(p[j]) ? 1.0 : 0.0;
      }
      return out;
    }
    case FamilyId::gaussian_mean: {
      for (int i = 0; i < n; ++i) {
        auto row = out.row(i);
        for (int j = 0; j < sample_dim_; ++j) row[j] = eta[j] + rng.normal();
      }
      return out;
    }
    case FamilyId::gaussian_covariance: {
      const int d = sample_dim_;
      const linalg::Mat w = symmetrized_precision(eta);
      const linalg::SymEig e = linalg::eig_sym(w);
      if (e.values.front() <= kPrecisionFloor) {
        throw std::domain_error("sample: precision matrix not positive definite");
      }
      // Sigma^{1/2} = V diag(lambda^{-1/2}) V^T with lambda the precision spectrum.
      linalg::Mat root(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double acc = 0.0;
          for (int k = 0; k < d; ++k)
            acc += e.vectors(i, k) * e.vectors(j, k) / std::sqrt(e.values[k]);
          root(i, j) = acc;
        }
      Vec z(d);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) z[j] = rng.normal();
        auto row = out.row(i);
        for (int a = 0; a < d; ++a) {
          double acc = 0.0;
          for (int b = 0; b < d; ++b) acc += root(a, b) * z[b];
          row[a] = acc;
        }
      }
      return out;
    }
  }
  throw std::logic_error("sample: unreachable");
}

MgfResidual ExpFamilyModel::mgf_residual(const Vec& eta, const Vec& shift, std::int64_t n_mc,
                                         Rng& rng) const {
  require_param(eta);
  if (shift.size() != eta.size()) throw std::invalid_argument("mgf_residual: size mismatch");
  Vec shifted(eta.size());
  for (std::size_t j = 0; j < eta.size(); ++j) shifted[j] = eta[j] + shift[j];
  if (!in_natural_range(shifted)) {
    throw std::domain_error("mgf_residual: eta + shift outside the natural parameter range");
  }
  const double closed_form = std::exp(log_partition(shifted) - log_partition(eta));

  MgfResidual out;
  if (family_ == FamilyId::bernoulli_product) {
    // Two-point support: evaluate E[exp(<s, X>)] exactly.
    double mean = 1.0;
    for (std::size_t j = 0; j < eta.size(); ++j) {
      const double p = sigmoid(eta[j]);
      mean *= (1.0 - p) + p * std::exp(shift[j]);
    }
    out.residual = std::abs(mean - closed_form);
    out.exact = true;
    return out;
  }

  if (n_mc <= 0) throw std::invalid_argument("mgf_residual: n_mc must be positive");
  std::vector<double> vals(static_cast<std::size_t>(n_mc));
  const Dataset x = sample(eta, static_cast<int>(n_mc), rng);
  for (std::int64_t i = 0; i < n_mc; ++i) {
    const Vec t = suff_stats(x.row(static_cast<int>(i)));
    vals[static_cast<std::size_t>(i)] = std::exp(linalg::dot(shift, t));
  }
  const auto ms = stats::mean_se(vals);
  out.residual = std::abs(ms.mean - closed_form);
  out.se = ms.se;
  return out;
}

}  // namespace fplab::expfam
