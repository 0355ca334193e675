#include "fplab/assouad.hpp"

#include <cmath>
#include <stdexcept>

namespace fplab::assouad {

AssouadBound assouad_bound(const AssouadParams& p) {
  if (p.d < 1) throw std::invalid_argument("assouad_bound: d must be positive");
  if (p.tau < 0.0 || p.eps < 0.0 || p.delta < 0.0 || p.coupling_distance < 0.0) {
    throw std::invalid_argument("assouad_bound: parameters must be non-negative");
  }
  const double d = p.coupling_distance;
  AssouadBound out;
  out.value = 0.5 * p.d * p.tau * (0.9 * std::exp(-10.0 * p.eps * d) - 10.0 * p.delta * d);
  out.vacuous = out.value <= 0.0;
  return out;
}

NBound heavy_tailed_n_bound(double alpha, int d, double eps, double delta) {
  if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("heavy_tailed_n_bound: need 0 < alpha <= 1");
  if (d < 1) throw std::invalid_argument("heavy_tailed_n_bound: d must be positive");
  if (eps < 0.0 || delta < 0.0) throw std::invalid_argument("heavy_tailed_n_bound: negative privacy parameter");
  if (!(eps + delta > 0.0)) throw std::invalid_argument("heavy_tailed_n_bound: eps + delta must be positive");
  NBound out;
  out.value = static_cast<double>(d) / (50.0 * (eps + delta) * alpha * alpha);
  out.delta_exceeds_eps = delta > eps;
  return out;
}

double mixture_separation(const hard::HeavyTailedSpec& spec, std::span<const double> u,
                          std::span<const double> v) {
  if (u.size() != v.size() || static_cast<int>(u.size()) != spec.dim()) {
    throw std::invalid_argument("mixture_separation: sign vectors must match the family dimension");
  }
  int hamming = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] != 1.0 && u[i] != -1.0) throw std::invalid_argument("mixture_separation: u not a sign vector");
    if (v[i] != 1.0 && v[i] != -1.0) throw std::invalid_argument("mixture_separation: v not a sign vector");
    if (u[i] != v[i]) ++hamming;
  }
  const double pt = spec.spike_p * spec.spike_t;
  return 4.0 * pt * pt * static_cast<double>(hamming);
}

}  // namespace fplab::assouad
