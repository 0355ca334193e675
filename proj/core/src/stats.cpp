#include "fplab/stats.hpp"

#include <cmath>

namespace fplab::stats {

namespace {

constexpr std::size_t kLeaf = 64;

template <typename F>
double pairwise_apply(std::span<const double> x, F&& f) {
  if (x.size() <= kLeaf) {
    double acc = 0.0;
    for (double v : x) acc += f(v);
    return acc;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_apply(x.first(half), f) + pairwise_apply(x.subspan(half), f);
}

}  // namespace

double pairwise_sum(std::span<const double> x) {
  return pairwise_apply(x, [](double v) { return v; });
}

MeanSE mean_se(std::span<const double> x) {
  MeanSE out;
  out.count = static_cast<std::int64_t>(x.size());
  if (x.empty()) return out;
  out.mean = pairwise_sum(x) / static_cast<double>(x.size());
  if (x.size() < 2) return out;
  const double m = out.mean;
  const double ss = pairwise_apply(x, [m](double v) { return (v - m) * (v - m); });
  const double var = ss / static_cast<double>(x.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(x.size()));
  return out;
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = pairwise_sum(x) / static_cast<double>(x.size());
  const double ss = pairwise_apply(x, [m](double v) { return (v - m) * (v - m); });
  return ss / static_cast<double>(x.size() - 1);
}

}  // namespace fplab::stats
