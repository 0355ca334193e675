#include <doctest.h>

#include <cmath>

#include "fplab/hard_instances.hpp"
#include "fplab/expfam.hpp"
#include "fplab/stats.hpp"
#include "fplab/linalg.hpp"
#include "support/test_support.hpp"

using namespace fplab;
using namespace fplab::hard;

TEST_CASE("prior box validation and derived quantities") {
  CHECK_THROWS_AS(PriorBox(Vec{1.0}, Vec{0.0}), std::invalid_argument);

  const PriorBox box(Vec{-1.0, 2.0, 0.0}, Vec{1.0, 2.0, 3.0});
  CHECK(box.width() == Vec{2.0, 0.0, 3.0});
  CHECK(box.midpoint() == Vec{0.0, 2.0, 1.5});
  CHECK(box.degenerate(1));
  CHECK_FALSE(box.degenerate(0));
  CHECK(box.width_sq_norm() == doctest::Approx(13.0).epsilon(1e-15));
  CHECK(box.width_inf_norm() == 3.0);

  Rng rng(211);
  for (int rep = 0; rep < 100; ++rep) {
    const Vec eta = box.sample_eta(rng);
    CHECK(box.contains(eta));
    CHECK(eta[1] == 2.0);  // degenerate coordinate stays pinned
  }
}

TEST_CASE("covariance sampler in one dimension") {
  Rng rng(223);
  for (int rep = 0; rep < 200; ++rep) {
    const CovInstance inst = cov_samp(1, rng);
    const double precision = 1.0 / inst.sigma(0, 0);
    CHECK(precision >= 0.5 - 1e-12);
    CHECK(precision <= 1.0 + 1e-12);
    CHECK(inst.sigma(0, 0) >= 1.0 - 1e-12);
    CHECK(inst.sigma(0, 0) <= 2.0 + 1e-12);
  }
}

TEST_CASE("covariance prior box widths and midpoint pattern") {
  for (const int d : {1, 2, 5}) {
    const PriorBox box = cov_prior_box(d);
    // No off-diagonal coordinates exist at d = 1; the widest interval is the
    // diagonal one of length 1/(2d).
    const double expected_inf = d == 1 ? 0.5 : 1.0 / d;
    CHECK(box.width_inf_norm() == doctest::Approx(expected_inf).epsilon(1e-15));
    CHECK(box.width_sq_norm() ==
          doctest::Approx(0.5 * (1.0 - 1.0 / (2.0 * d))).epsilon(1e-14));

    const Vec m = box.midpoint();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double v = m[static_cast<std::size_t>(i) * d + j];
        if (i == j) CHECK(v == doctest::Approx(0.75).epsilon(1e-14));
        else CHECK(v == 0.0);
      }
  }
  // d = 2 exact value from the width formula.
  CHECK(cov_prior_box(2).width_sq_norm() == doctest::Approx(3.0 / 8.0).epsilon(1e-14));
}

TEST_CASE("sampled eta0 lands in the prior box and the spectrum in [1, 2]") {
  Rng rng(227);
  for (const int d : {1, 2, 5, 10, 20}) {
    for (int rep = 0; rep < 50; ++rep) {
      const CovInstance inst = cov_samp(d, rng);
      CHECK(inst.box.contains(inst.eta0));
      const auto range = linalg::eig_range_symmetric(inst.sigma);
      CHECK(range.first >= 1.0 - 1e-9);
      CHECK(range.second <= 2.0 + 1e-9);
    }
  }
}

TEST_CASE("eta0 coordinates look independent") {
  Rng rng(229);
  const int d = 2;
  const int reps = 10000;
  const PriorBox box = cov_prior_box(d);
  std::vector<int> live;
  for (int j = 0; j < d * d; ++j)
    if (!box.degenerate(j)) live.push_back(j);

  const int k = static_cast<int>(live.size());
  std::vector<Vec> draws(reps);
  for (int r = 0; r < reps; ++r) draws[r] = cov_samp(d, rng).eta0;

  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      double ma = 0, mb = 0;
      for (const auto& e : draws) {
        ma += e[live[a]];
        mb += e[live[b]];
      }
      ma /= reps;
      mb /= reps;
      double cab = 0, va = 0, vb = 0;
      for (const auto& e : draws) {
        cab += (e[live[a]] - ma) * (e[live[b]] - mb);
        va += (e[live[a]] - ma) * (e[live[a]] - ma);
        vb += (e[live[b]] - mb) * (e[live[b]] - mb);
      }
      const double corr = cab / std::sqrt(va * vb);
      CHECK(std::abs(corr) <= 4.0 / std::sqrt(static_cast<double>(reps)));
    }
  }
}

TEST_CASE("product and mean priors") {
  const double ln2 = std::log(2.0);
  const PriorBox prod = product_prior(3);
  CHECK(prod.width_sq_norm() == doctest::Approx(4.0 * ln2 * ln2 * 3.0).epsilon(1e-14));
  CHECK(prod.lo() == Vec{-ln2, -ln2, -ln2});

  const PriorBox mean = gaussian_mean_prior(4);
  CHECK(mean.width() == Vec{2.0, 2.0, 2.0, 2.0});
  CHECK(mean.midpoint() == Vec{0.0, 0.0, 0.0, 0.0});
  CHECK(mean.width_sq_norm() == doctest::Approx(16.0).epsilon(1e-15));
}

TEST_CASE("boxes sit inside the natural parameter range") {
  // Both endpoint vectors (and everything between) are valid parameters.
  const auto bern = fplab::expfam::ExpFamilyModel::bernoulli_product(3);
  CHECK(bern.in_natural_range(product_prior(3).lo()));
  CHECK(bern.in_natural_range(product_prior(3).hi()));

  const auto mean = fplab::expfam::ExpFamilyModel::gaussian_mean(4);
  CHECK(mean.in_natural_range(gaussian_mean_prior(4).lo()));
  CHECK(mean.in_natural_range(gaussian_mean_prior(4).hi()));

  // The precision box: every corner symmetrizes to a matrix with Gershgorin
  // interval inside [1/2, 1], so any point of the box is in range.
  Rng rng(271);
  const auto cov = fplab::expfam::ExpFamilyModel::gaussian_covariance(3);
  const PriorBox box = cov_prior_box(3);
  CHECK(cov.in_natural_range(box.lo()));
  CHECK(cov.in_natural_range(box.hi()));
  for (int rep = 0; rep < 50; ++rep) CHECK(cov.in_natural_range(box.sample_eta(rng)));
}

TEST_CASE("heavy-tailed spec validation") {
  CHECK_THROWS_AS(HeavyTailedSpec(Vec{1.0, 0.5}, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(HeavyTailedSpec(Vec{1.0}, 2.0, 0.5), std::invalid_argument);  // p t^2 = 2

  const auto spec = default_heavy_spec(Vec{1.0, -1.0, 1.0, -1.0}, 0.5);
  CHECK(spec.spike_p * spec.spike_t * spec.spike_t == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(spec.spike_p == doctest::Approx(2.0 * 0.25 / 4.0).epsilon(1e-14));
}

TEST_CASE("heavy sampling with degenerate probabilities") {
  Rng rng(233);
  const HeavyTailedSpec zero(Vec{1.0, -1.0}, 1.0, 0.0);
  const Dataset x = heavy_sample(zero, 100, rng);
  for (double v : x.values) CHECK(v == 0.0);

  const HeavyTailedSpec one(Vec{1.0, -1.0}, 1.0, 1.0);
  const Dataset y = heavy_sample(one, 100, rng);
  for (int i = 0; i < y.n; ++i) {
    CHECK(y.row(i)[0] == 1.0);
    CHECK(y.row(i)[1] == -1.0);
  }
}

TEST_CASE("heavy sample empirical mean") {
  Rng rng(239);
  const auto spec = default_heavy_spec(Vec{1.0, -1.0, 1.0}, 0.6);
  const int n = 100000;
  const Dataset x = heavy_sample(spec, n, rng);
  for (int j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += x.row(i)[j];
    mean /= n;
    const double target = spec.mean_coord(j);
    const double var = spec.spike_p * (1.0 - spec.spike_p) * spec.spike_t * spec.spike_t;
    CHECK(std::abs(mean - target) <= 3.0 * std::sqrt(var / n));
  }
}

TEST_CASE("heavy sample second moment is direction independent") {
  Rng rng(241);
  const auto spec = default_heavy_spec(Vec{1.0, -1.0, 1.0, 1.0, -1.0}, 0.7);
  const int n = 50000;
  const Dataset x = heavy_sample(spec, n, rng);
  const double target = spec.direction_second_moment();
  for (int rep = 0; rep < 20; ++rep) {
    Vec u(5);
    double nsq = 0.0;
    for (auto& v : u) {
      v = rng.normal();
      nsq += v * v;
    }
    for (auto& v : u) v /= std::sqrt(nsq);
    std::vector<double> proj(n);
    for (int i = 0; i < n; ++i) {
      double ip = 0.0;
      for (int j = 0; j < 5; ++j) ip += (x.row(i)[j] - spec.mean_coord(j)) * u[j];
      proj[i] = ip * ip;
    }
    const auto ms = stats::mean_se(proj);
    CHECK(std::abs(ms.mean - target) <= 3.0 * ms.se);
  }
}

TEST_CASE("coupling endpoints") {
  Rng rng(251);
  const HeavyTailedSpec zero(Vec{1.0, 1.0}, 1.0, 0.0);
  CHECK(assouad_coupling(zero, 0, 500, rng).hamming == 0);

  const HeavyTailedSpec one(Vec{1.0, 1.0}, 1.0, 1.0);
  CHECK(assouad_coupling(one, 1, 500, rng).hamming == 500);

  CHECK_THROWS_AS(assouad_coupling(one, 2, 10, rng), std::invalid_argument);
}

TEST_CASE("coupling hamming distance concentrates at n p") {
  Rng rng(257);
  const HeavyTailedSpec spec(Vec{1.0, -1.0, 1.0}, 1.0, 0.1);
  const int n = 10000;
  const int reps = 100;
  std::vector<double> ham(reps);
  for (int r = 0; r < reps; ++r) {
    ham[r] = static_cast<double>(assouad_coupling(spec, 1, n, rng).hamming);
  }
  const auto ms = stats::mean_se(ham);
  CHECK(std::abs(ms.mean - 1000.0) <= 3.0 * ms.se);
}

TEST_CASE("coupling only touches the flipped coordinate") {
  Rng rng(263);
  const auto spec = default_heavy_spec(Vec{1.0, -1.0, 1.0, -1.0}, 0.8);
  const Coupling c = assouad_coupling(spec, 2, 2000, rng);
  std::int64_t recount = 0;
  for (int i = 0; i < c.x.n; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (j == 2) {
        if (c.x.row(i)[j] != 0.0) {
          CHECK(c.y.row(i)[j] == -c.x.row(i)[j]);
          ++recount;
        } else {
          CHECK(c.y.row(i)[j] == 0.0);
        }
      } else {
        CHECK(c.x.row(i)[j] == c.y.row(i)[j]);
      }
    }
  }
  CHECK(recount == c.hamming);
}
