// Microbenchmarks for the hot paths of the verification lab: instance
// sampling, the correlation statistics, the quadratic-form route, and the
// DP covariance pipeline.

#include <benchmark/benchmark.h>

#include "fplab/expfam.hpp"
#include "fplab/fingerprint.hpp"
#include "fplab/hard_instances.hpp"
#include "fplab/linalg.hpp"
#include "fplab/mechanisms.hpp"
#include "fplab/rng.hpp"

namespace {

using namespace fplab;

void BM_CovSamp(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hard::cov_samp(d, rng));
  }
}
BENCHMARK(BM_CovSamp)->Arg(3)->Arg(10)->Arg(20);

void BM_Kronecker(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(2);
  Mat a(d, d), b(d, d);
  for (auto& v : a.data()) v = rng.normal();
  for (auto& v : b.data()) v = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::kronecker(a, b));
  }
}
BENCHMARK(BM_Kronecker)->Arg(3)->Arg(8)->Arg(16)->Arg(32);

void BM_SuffStatQuadform(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(3);
  const auto inst = hard::cov_samp(d, rng);
  const auto model = expfam::ExpFamilyModel::gaussian_covariance(d);
  Vec s(static_cast<std::size_t>(d) * d);
  for (auto& v : s) v = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.suff_stat_quadform(inst.eta0, s));
  }
}
BENCHMARK(BM_SuffStatQuadform)->Arg(3)->Arg(10);

void BM_CorrStats(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  const int d = 3;
  const auto model = expfam::ExpFamilyModel::gaussian_covariance(d);
  const auto box = hard::cov_prior_box(d);
  const Vec eta = hard::cov_samp(d, rng).eta0;
  const Dataset x = model.sample(eta, n, rng);
  const Vec a(static_cast<std::size_t>(d) * d, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fp::corr_stats(model, box, eta, x, a));
  }
}
BENCHMARK(BM_CorrStats)->Arg(20)->Arg(200);

void BM_DpCovariancePipeline(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(5);
  const int d = 3;
  const auto model = expfam::ExpFamilyModel::gaussian_covariance(d);
  const auto inst = hard::cov_samp(d, rng);
  const Dataset x = model.sample(inst.eta0, n, rng);
  const auto mech = mech::make_dp_covariance(d, 0.5, 1e-5, 8.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mech.apply(x, rng));
  }
}
BENCHMARK(BM_DpCovariancePipeline)->Arg(1000)->Arg(30000);

}  // namespace

BENCHMARK_MAIN();
