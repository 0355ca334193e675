#pragma once

#include <cstdint>
#include <span>

namespace fplab::stats {

// Pairwise (cascade) summation. Order-independent of how the values were
// produced, so aggregates match across worker counts bit for bit.
double pairwise_sum(std::span<const double> x);

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  std::int64_t count = 0;
};

// Two-pass mean and standard error, both passes pairwise.
MeanSE mean_se(std::span<const double> x);

double sample_variance(std::span<const double> x);

}  // namespace fplab::stats
