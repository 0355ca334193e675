#include <doctest.h>

#include <cmath>

#include "fplab/expfam.hpp"
#include "fplab/hard_instances.hpp"
#include "fplab/mechanisms.hpp"
#include "support/test_support.hpp"

using namespace fplab;
using expfam::ExpFamilyModel;
using expfam::FamilyId;

namespace {

// Central finite differences of the log-partition; the independent route the
// closed-form moments are checked against.
Vec fd_gradient(const ExpFamilyModel& model, const Vec& eta, double h) {
  Vec g(eta.size());
  for (std::size_t j = 0; j < eta.size(); ++j) {
    Vec up = eta, down = eta;
    up[j] += h;
    down[j] -= h;
    g[j] = (model.log_partition(up) - model.log_partition(down)) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian(const ExpFamilyModel& model, const Vec& eta, double h) {
  const int k = static_cast<int>(eta.size());
  Mat hess(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      Vec pp = eta, pm = eta, mp = eta, mm = eta;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      hess(i, j) = (model.log_partition(pp) - model.log_partition(pm) - model.log_partition(mp) +
                    model.log_partition(mm)) /
                   (4.0 * h * h);
    }
  }
  return hess;
}

double rel_frob_gap(const Mat& a, const Mat& b) {
  return linalg::frobenius_norm(a - b) / std::max(linalg::frobenius_norm(b), 1e-300);
}

Vec random_in_range_eta(const ExpFamilyModel& model, Rng& rng) {
  if (model.family() == FamilyId::gaussian_covariance) {
    // Draw from the hard-instance box; always well inside the range.
    const int d = model.sample_dim();
    return hard::cov_samp(d, rng).eta0;
  }
  Vec eta(model.param_dim());
  for (auto& v : eta) v = rng.uniform(-1.0, 1.0);
  return eta;
}

}  // namespace

TEST_CASE("sufficient statistics per family") {
  const auto mean = ExpFamilyModel::gaussian_mean(2);
  CHECK(mean.suff_stats(Vec{1, 2}) == Vec{1, 2});

  const auto bern = ExpFamilyModel::bernoulli_product(2);
  CHECK(bern.suff_stats(Vec{0, 1}) == Vec{0, 1});

  const auto cov = ExpFamilyModel::gaussian_covariance(2);
  CHECK(cov.suff_stats(Vec{1, 0}) == Vec{-0.5, 0, 0, 0});
}

TEST_CASE("log partition values") {
  const auto mean = ExpFamilyModel::gaussian_mean(2);
  CHECK(mean.log_partition(Vec{0, 0}) == 0.0);

  const auto bern = ExpFamilyModel::bernoulli_product(1);
  CHECK(bern.log_partition(Vec{0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  const auto cov = ExpFamilyModel::gaussian_covariance(1);
  CHECK(cov.log_partition(Vec{1}) ==
        doctest::Approx(0.5 * std::log(2.0 * M_PI)).epsilon(1e-15));

  CHECK_THROWS_AS(cov.log_partition(Vec{-1.0}), std::domain_error);
  CHECK_FALSE(cov.in_natural_range(Vec{0.0}));
}

TEST_CASE("closed-form moments") {
  const auto mean = ExpFamilyModel::gaussian_mean(3);
  const Vec eta{0.3, -0.7, 1.1};
  const auto mm = mean.moments(eta);
  CHECK(mm.mu_t == eta);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(mm.sigma_t(i, j) == (i == j ? 1.0 : 0.0));

  const auto bern = ExpFamilyModel::bernoulli_product(1);
  const double e = 0.4;
  const auto bm = bern.moments(Vec{e});
  const double p = std::exp(e) / (1.0 + std::exp(e));
  CHECK(bm.mu_t[0] == doctest::Approx(p).epsilon(1e-14));
  CHECK(bm.sigma_t(0, 0) ==
        doctest::Approx(std::exp(e) / ((1.0 + std::exp(e)) * (1.0 + std::exp(e)))).epsilon(1e-14));
}

TEST_CASE("moments match finite differences of the log partition") {
  Rng rng(101);
  const double h = 1e-5;
  for (const auto family : {FamilyId::bernoulli_product, FamilyId::gaussian_mean,
                            FamilyId::gaussian_covariance}) {
    const int d = 2;
    const ExpFamilyModel model = family == FamilyId::bernoulli_product
                                     ? ExpFamilyModel::bernoulli_product(d)
                                 : family == FamilyId::gaussian_mean
                                     ? ExpFamilyModel::gaussian_mean(d)
                                     : ExpFamilyModel::gaussian_covariance(d);
    for (int rep = 0; rep < 20; ++rep) {
      const Vec eta = random_in_range_eta(model, rng);
      const auto mom = model.moments(eta);

      const Vec g = fd_gradient(model, eta, h);
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        num += (g[j] - mom.mu_t[j]) * (g[j] - mom.mu_t[j]);
        den += mom.mu_t[j] * mom.mu_t[j];
      }
      CHECK(std::sqrt(num) <= 1e-4 * std::max(std::sqrt(den), 1.0));

      const Mat hess = fd_hessian(model, eta, h);
      CHECK(rel_frob_gap(hess, mom.sigma_t) <= 1e-4);
    }
  }
}

TEST_CASE("suff stat covariance is symmetric PSD") {
  Rng rng(103);
  for (int rep = 0; rep < 10; ++rep) {
    const auto model = ExpFamilyModel::gaussian_covariance(2);
    const Vec eta = random_in_range_eta(model, rng);
    const auto mom = model.moments(eta);
    CHECK(linalg::is_symmetric(mom.sigma_t, 1e-10));
    CHECK(linalg::eig_range_symmetric(mom.sigma_t).first >= -1e-8);
  }
}

TEST_CASE("quadratic form route agrees with the materialized covariance") {
  Rng rng(107);
  for (const int d : {2, 3}) {
    const auto model = ExpFamilyModel::gaussian_covariance(d);
    const Vec eta = random_in_range_eta(model, rng);
    const auto mom = model.moments(eta);
    for (int rep = 0; rep < 5; ++rep) {
      Vec s(static_cast<std::size_t>(d) * d);
      for (auto& v : s) v = rng.normal();
      const double direct = model.suff_stat_quadform(eta, s);
      const double via_matrix = linalg::dot(s, linalg::matvec(mom.sigma_t, s));
      CHECK(direct == doctest::Approx(via_matrix).epsilon(1e-10));
    }
  }
}

TEST_CASE("density normalizes in one dimension") {
  // Quadrature for the continuous families, exact enumeration for Bernoulli.
  const auto bern = ExpFamilyModel::bernoulli_product(1);
  const double eta_b = 0.37;
  double mass = 0.0;
  for (const double x : {0.0, 1.0}) {
    mass += std::exp(eta_b * x - bern.log_partition(Vec{eta_b}));
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  const auto mean = ExpFamilyModel::gaussian_mean(1);
  const double eta_m = 0.8;
  const auto quad_m = testsup::gauss_legendre(160, eta_m - 10.0, eta_m + 10.0);
  const double z_m = mean.log_partition(Vec{eta_m});
  const double total_m = testsup::integrate(quad_m, [&](double x) {
    const Vec xv{x};
    return std::exp(mean.log_carrier(xv) + eta_m * x - z_m);
  });
  CHECK(std::abs(total_m - 1.0) <= 1e-6);

  const auto cov = ExpFamilyModel::gaussian_covariance(1);
  const double eta_c = 0.8;  // variance 1.25
  const auto quad_c = testsup::gauss_legendre(160, -14.0, 14.0);
  const double z_c = cov.log_partition(Vec{eta_c});
  const double total_c = testsup::integrate(quad_c, [&](double x) {
    return std::exp(-0.5 * eta_c * x * x - z_c);
  });
  CHECK(std::abs(total_c - 1.0) <= 1e-6);
}

TEST_CASE("upper-triangular and symmetric parameterizations agree") {
  Rng rng(109);
  for (const int d : {2, 3, 4}) {
    const auto model = ExpFamilyModel::gaussian_covariance(d);
    const auto inst = hard::cov_samp(d, rng);
    // Symmetric vector: the flattened precision matrix itself.
    const Mat precision = linalg::sym_inverse(inst.sigma);
    const Vec eta_sym = linalg::flatten(precision);

    const double z0 = model.log_partition(inst.eta0);
    const double z = model.log_partition(eta_sym);
    CHECK(std::abs(z - z0) <= 1e-10 * std::max(1.0, std::abs(z)));

    for (int rep = 0; rep < 5; ++rep) {
      Vec x(d);
      for (auto& v : x) v = rng.normal();
      const Vec t = model.suff_stats(x);
      const double ip0 = linalg::dot(inst.eta0, t);
      const double ip = linalg::dot(eta_sym, t);
      CHECK(std::abs(ip - ip0) <= 1e-10 * std::max(1.0, std::abs(ip)));
    }
  }
}

TEST_CASE("sampler hits the mean for the standard normal") {
  const auto model = ExpFamilyModel::gaussian_mean(2);
  Rng rng(113);
  const auto x = model.sample(Vec{0, 0}, 1000000, rng);
  Vec mean(2, 0.0);
  for (int i = 0; i < x.n; ++i) {
    mean[0] += x.row(i)[0];
    mean[1] += x.row(i)[1];
  }
  for (auto& v : mean) v /= x.n;
  CHECK(std::abs(mean[0]) <= 4e-3);
  CHECK(std::abs(mean[1]) <= 4e-3);
}

TEST_CASE("sampler hits the symmetric Bernoulli frequency") {
  const auto model = ExpFamilyModel::bernoulli_product(1);
  Rng rng(127);
  const int n = 100000;
  const auto x = model.sample(Vec{0.0}, n, rng);
  double ones = 0.0;
  for (int i = 0; i < n; ++i) ones += x.row(i)[0];
  const double freq = ones / n;
  const double se = 0.5 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(freq - 0.5) <= 3.0 * se);
}

TEST_CASE("covariance sampler second moment matches entrywise") {
  Rng rng(131);
  const int d = 2;
  const auto inst = hard::cov_samp(d, rng);
  const auto model = ExpFamilyModel::gaussian_covariance(d);
  const int n = 100000;
  const auto x = model.sample(inst.eta0, n, rng);

  const Mat second = mech::empirical_covariance(x);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double var =
          inst.sigma(i, i) * inst.sigma(j, j) + inst.sigma(i, j) * inst.sigma(i, j);
      const double se = std::sqrt(var / n);
      CHECK(std::abs(second(i, j) - inst.sigma(i, j)) <= 3.0 * se);
    }
}

TEST_CASE("mgf residual") {
  Rng rng(137);
  const auto mean = ExpFamilyModel::gaussian_mean(2);

  // Zero shift is exact by construction, even on the Monte Carlo path.
  const auto zero = mean.mgf_residual(Vec{0.1, -0.2}, Vec{0, 0}, 1000, rng);
  CHECK(zero.residual == 0.0);

  const auto bern = ExpFamilyModel::bernoulli_product(1);
  const auto exact = bern.mgf_residual(Vec{0.3}, Vec{0.5}, 1, rng);
  CHECK(exact.exact);
  CHECK(exact.residual <= 1e-12);

  const auto mc = mean.mgf_residual(Vec{0.1, -0.2}, Vec{0.15, 0.1}, 100000, rng);
  CHECK(mc.residual <= 3.0 * mc.se);

  const auto cov = ExpFamilyModel::gaussian_covariance(1);
  CHECK_THROWS_AS(cov.mgf_residual(Vec{0.5}, Vec{-0.5}, 10, rng), std::domain_error);
}
