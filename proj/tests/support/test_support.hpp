#pragma once

// Shared helpers for the test suites: random inputs, and independent oracles
// (dense inverse, fixed-order quadrature, exhaustive enumeration) that do not
// go through the library paths they are used to check.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fplab/linalg.hpp"
#include "fplab/rng.hpp"

namespace testsup {

using fplab::Mat;
using fplab::Rng;
using fplab::Vec;

inline Mat random_mat(int rows, int cols, Rng& rng, double scale = 1.0) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

inline Mat random_symmetric(int d, Rng& rng, double scale = 1.0) {
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double g = scale * rng.normal();
      m(i, j) = g;
      m(j, i) = g;
    }
  return m;
}

inline Mat random_spd(int d, Rng& rng, double ridge = 0.5) {
  const Mat g = random_mat(d, d, rng);
  Mat m = fplab::linalg::transpose(g) * g;
  for (int i = 0; i < d; ++i) m(i, i) += ridge;
  return m;
}

// Gauss-Jordan with partial pivoting; an oracle for general (non-symmetric)
// inverses, which the library deliberately does not provide.
inline Mat gauss_jordan_inverse(Mat a) {
  if (!a.square()) throw std::invalid_argument("gauss_jordan_inverse: square input required");
  const int n = a.rows();
  Mat inv = Mat::identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) < 1e-12) throw std::runtime_error("gauss_jordan_inverse: singular");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(a(pivot, c), a(col, c));
        std::swap(inv(pivot, c), inv(col, c));
      }
    }
    const double diag = a(col, col);
    for (int c = 0; c < n; ++c) {
      a(col, c) /= diag;
      inv(col, c) /= diag;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

// Gauss-Legendre nodes and weights on [a, b] by Newton iteration on the
// Legendre recurrence.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Quadrature gauss_legendre(int order, double a, double b) {
  Quadrature q;
  q.nodes.resize(order);
  q.weights.resize(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < order; ++i) {
    // Chebyshev initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = mid + half * x;
    q.weights[i] = 2.0 * half / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

inline double integrate(const Quadrature& q, const std::function<double(double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) acc += q.weights[i] * f(q.nodes[i]);
  return acc;
}

// Exhaustive oracle for the one-dimensional two-point family on {0, 1}:
// E_eta E_X [ Z + (f(X) - eta)^2 ] with eta uniform on [-w, w], n <= 16
// samples, and a deterministic estimator f mapping datasets to [-w, w].
// Z here is the total correlation statistic of the box [-w, w].
inline double bernoulli_lhs_oracle(int n, double w,
                                   const std::function<double(const std::vector<int>&)>& f,
                                   int quad_order = 96) {
  if (n < 1 || n > 16) throw std::invalid_argument("bernoulli_lhs_oracle: n out of range");
  const Quadrature q = gauss_legendre(quad_order, -w, w);
  const double r = 2.0 * w;  // box width
  const double prior_density = 1.0 / r;

  double outer = 0.0;
  for (std::size_t qi = 0; qi < q.nodes.size(); ++qi) {
    const double eta = q.nodes[qi];
    const double p1 = 1.0 / (1.0 + std::exp(-eta));  // P(X = 1)
    double inner = 0.0;
    std::vector<int> xs(n);
    for (int mask = 0; mask < (1 << n); ++mask) {
      double prob = 1.0;
      int ones = 0;
      for (int i = 0; i < n; ++i) {
        xs[i] = (mask >> i) & 1;
        ones += xs[i];
        prob *= xs[i] ? p1 : (1.0 - p1);
      }
      const double est = f(xs);
      const double dev = est - eta;  // midpoint is zero
      const double z = (0.25 * r * r - eta * eta) * (est - eta) * (ones - n * p1);
      inner += prob * (z + dev * dev);
    }
    outer += q.weights[qi] * prior_density * inner;
  }
  return outer;
}

}  // namespace testsup
