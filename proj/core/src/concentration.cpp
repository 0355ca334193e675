#include "fplab/concentration.hpp"

#include <algorithm>
#include <cmath>

namespace fplab::fp {

double hanson_wright_bound(double t, double frob_norm, double spectral_norm) {
  if (t < 0.0) throw std::invalid_argument("hanson_wright_bound: t must be non-negative");
  if (!(frob_norm > 0.0) || !(spectral_norm > 0.0)) {
    throw std::invalid_argument("hanson_wright_bound: norms must be positive");
  }
  const double quad = t * t / (frob_norm * frob_norm);
  const double lin = t / spectral_norm;
  return 2.0 * std::exp(-kHansonWrightConst * std::min(quad, lin));
}

double chi_square_upper_bound(double k, double t) {
  if (!(k > 0.0)) throw std::invalid_argument("chi_square_upper_bound: k must be positive");
  if (t < k) throw std::invalid_argument("chi_square_upper_bound: requires t >= k");
  const double root = std::sqrt(2.0 * t - k) - std::sqrt(k);
  return std::exp(-0.25 * root * root);
}

double chi_square_lower_bound(double k, double t) {
  if (!(k > 0.0)) throw std::invalid_argument("chi_square_lower_bound: k must be positive");
  if (t > k || t < 0.0) throw std::invalid_argument("chi_square_lower_bound: requires 0 <= t <= k");
  const double gap = k - t;
  return std::exp(-gap * gap / (4.0 * k));
}

double erfc_bound(double x) {
  if (x < 0.0) throw std::invalid_argument("erfc_bound: x must be non-negative");
  return std::exp(-x * x);
}

double concentration_bound(BoundKind kind, const ConcentrationParams& p) {
  switch (kind) {
    case BoundKind::hanson_wright: return hanson_wright_bound(p.t, p.frob, p.spec);
    case BoundKind::chi_square_upper: return chi_square_upper_bound(p.k, p.t);
    case BoundKind::chi_square_lower: return chi_square_lower_bound(p.k, p.t);
    case BoundKind::erfc: return erfc_bound(p.x);
  }
  throw std::invalid_argument("concentration_bound: unknown kind");
}

}  // namespace fplab::fp
