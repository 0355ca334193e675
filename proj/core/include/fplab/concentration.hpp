#pragma once

#include <stdexcept>

namespace fplab::fp {

// Constant in the Gaussian quadratic-form tail bound.
inline constexpr double kHansonWrightConst = 0.036425;

// P[|X^T A X - E| >= t] <= 2 exp(-c min(t^2 / |A|_F^2, t / |A|_2)) for
// X standard normal and A symmetric.
double hanson_wright_bound(double t, double frob_norm, double spectral_norm);

// Chi-square upper tail: P[X >= t] <= exp(-(sqrt(2t - k) - sqrt(k))^2 / 4)
// for t >= k degrees of freedom.
double chi_square_upper_bound(double k, double t);

// Chi-square lower tail: P[X <= t] <= exp(-(k - t)^2 / (4k)) for t <= k.
double chi_square_lower_bound(double k, double t);

// erfc(x) <= exp(-x^2) for x >= 0; returns the bound.
double erfc_bound(double x);

enum class BoundKind { hanson_wright, chi_square_upper, chi_square_lower, erfc };

struct ConcentrationParams {
  double t = 0.0;     // tail threshold (hanson_wright, chi_square_*)
  double k = 0.0;     // chi-square degrees of freedom
  double frob = 0.0;  // |A|_F for hanson_wright
  double spec = 0.0;  // |A|_2 for hanson_wright
  double x = 0.0;     // erfc argument
};

double concentration_bound(BoundKind kind, const ConcentrationParams& p);

}  // namespace fplab::fp
