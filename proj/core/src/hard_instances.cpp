#include "fplab/hard_instances.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fplab::hard {

PriorBox::PriorBox(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.empty()) {
    throw std::invalid_argument("PriorBox: endpoint vectors must have equal positive length");
  }
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    if (!(lo_[j] <= hi_[j])) {
      std::ostringstream os;
      os << "PriorBox: lo > hi at coordinate " << j;
      throw std::invalid_argument(os.str());
    }
  }
}

Vec PriorBox::width() const {
  Vec r(lo_.size());
  for (std::size_t j = 0; j < lo_.size(); ++j) r[j] = hi_[j] - lo_[j];
  return r;
}

Vec PriorBox::midpoint() const {
  Vec m(lo_.size());
  for (std::size_t j = 0; j < lo_.size(); ++j) m[j] = 0.5 * (lo_[j] + hi_[j]);
  return m;
}

double PriorBox::width_sq_norm() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    const double r = hi_[j] - lo_[j];
    acc += r * r;
  }
  return acc;
}

double PriorBox::width_inf_norm() const {
  double m = 0.0;
  for (std::size_t j = 0; j < lo_.size(); ++j) m = std::max(m, hi_[j] - lo_[j]);
  return m;
}

bool PriorBox::contains(const Vec& eta, double tol) const {
  if (eta.size() != lo_.size()) return false;
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    if (eta[j] < lo_[j] - tol || eta[j] > hi_[j] + tol) return false;
  }
  return true;
}

Vec PriorBox::sample_eta(Rng& rng) const {
  Vec eta(lo_.size());
  for (std::size_t j = 0; j < lo_.size(); ++j) eta[j] = rng.uniform(lo_[j], hi_[j]);
  return eta;
}

PriorBox cov_prior_box(int d) {
  if (d <= 0) throw std::invalid_argument("cov_prior_box: d must be positive");
  const double diag_half = 1.0 / (4.0 * d);   // eta0 diagonal = precision diagonal
  const double off_half = 1.0 / (2.0 * d);    // eta0 above-diagonal = 2 * precision entry
  Vec lo(static_cast<std::size_t>(d) * d, 0.0);
  Vec hi(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const std::size_t l = static_cast<std::size_t>(i) * d + j;
      if (i == j) {
        lo[l] = 0.75 - diag_half;
        hi[l] = 0.75 + diag_half;
      } else if (j > i) {
        lo[l] = -off_half;
        hi[l] = off_half;
      }  // below the diagonal stays degenerate at 0
    }
  }
  return PriorBox(std::move(lo), std::move(hi));
}

CovInstance cov_samp(int d, Rng& rng) {
  if (d <= 0) throw std::invalid_argument("cov_samp: d must be positive");
  const double half = 1.0 / (4.0 * d);
  linalg::Mat precision(d, d);
  linalg::Mat upper(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (i == j) {
        const double v = rng.uniform(0.75 - half, 0.75 + half);
        precision(i, i) = v;
        upper(i, i) = 0.5 * v;
      } else {
        const double v = rng.uniform(-half, half);
        precision(i, j) = v;
        precision(j, i) = v;
        upper(i, j) = v;
      }
    }
  }
  CovInstance out{linalg::sym_inverse(precision), Vec(), cov_prior_box(d)};
  out.eta0 = linalg::flatten(upper);
  for (double& v : out.eta0) v *= 2.0;
  return out;
}

PriorBox product_prior(int d) {
  if (d <= 0) throw std::invalid_argument("product_prior: d must be positive");
  const double l = std::log(2.0);
  return PriorBox(Vec(d, -l), Vec(d, l));
}

PriorBox gaussian_mean_prior(int d) {
  if (d <= 0) throw std::invalid_argument("gaussian_mean_prior: d must be positive");
  return PriorBox(Vec(d, -1.0), Vec(d, 1.0));
}

HeavyTailedSpec::HeavyTailedSpec(Vec v, double t, double p)
    : sign_v(std::move(v)), spike_t(t), spike_p(p) {
  if (sign_v.empty()) throw std::invalid_argument("HeavyTailedSpec: empty sign vector");
  for (double s : sign_v) {
    if (s != 1.0 && s != -1.0) {
      throw std::invalid_argument("HeavyTailedSpec: sign vector entries must be +-1");
    }
  }
  if (!(spike_t > 0.0)) throw std::invalid_argument("HeavyTailedSpec: spike value must be positive");
  if (spike_p < 0.0 || spike_p > 1.0) {
    throw std::invalid_argument("HeavyTailedSpec: spike probability must lie in [0, 1]");
  }
  if (spike_p * spike_t * spike_t > 1.0 + 1e-12) {
    throw std::invalid_argument("HeavyTailedSpec: second-moment budget p t^2 <= 1 violated");
  }
}

HeavyTailedSpec default_heavy_spec(Vec sign_v, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("default_heavy_spec: alpha must be positive");
  const double d = static_cast<double>(sign_v.size());
  const double p = 2.0 * alpha * alpha / d;
  const double t = std::sqrt(d) / (std::sqrt(2.0) * alpha);
  if (p > 1.0) throw std::invalid_argument("default_heavy_spec: 2 alpha^2 / d exceeds 1");
  return HeavyTailedSpec(std::move(sign_v), t, p);
}

Dataset heavy_sample(const HeavyTailedSpec& spec, int n, Rng& rng) {
  Dataset out(n, spec.dim());
  for (int i = 0; i < n; ++i) {
    auto row = out.row(i);
    for (int j = 0; j < spec.dim(); ++j) {
      row[j] = rng.bernoulli(spec.spike_p) ? spec.sign_v[j] * spec.spike_t : 0.0;
    }
  }
  return out;
}

Coupling assouad_coupling(const HeavyTailedSpec& spec, int coord, int n, Rng& rng) {
  const int d = spec.dim();
  if (coord < 0 || coord >= d) throw std::invalid_argument("assouad_coupling: coordinate out of range");

  // Mixture member: uniform sign pattern with the tested coordinate pinned up.
  Vec e(d);
  for (int j = 0; j < d; ++j) e[j] = rng.bernoulli(0.5) ? 1.0 : -1.0;
  e[coord] = 1.0;

  Coupling out;
  out.x = heavy_sample(HeavyTailedSpec(e, spec.spike_t, spec.spike_p), n, rng);
  out.y = out.x;
  for (int i = 0; i < n; ++i) {
    auto row = out.y.row(i);
    if (row[coord] != 0.0) {
      row[coord] = -row[coord];
      ++out.hamming;
    }
  }
  return out;
}

}  // namespace fplab::hard
