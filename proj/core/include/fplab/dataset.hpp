#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace fplab {

// n samples of dimension dim, row-major.
struct Dataset {
  int n = 0;
  int dim = 0;
  std::vector<double> values;  // n * dim

  Dataset() = default;
  Dataset(int n_, int dim_) : n(n_), dim(dim_), values(static_cast<std::size_t>(n_) * dim_, 0.0) {
    if (n_ < 0 || dim_ <= 0) throw std::invalid_argument("Dataset: bad shape");
  }

  std::span<const double> row(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<double> row(int i) {
    return {values.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
};

}  // namespace fplab
