#pragma once

#include <span>

#include "fplab/hard_instances.hpp"

namespace fplab::assouad {

// Inputs to the coupling-based minimax bound: per-coordinate separation tau,
// privacy parameters, and expected coupling Hamming distance.
struct AssouadParams {
  int d = 0;
  double tau = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double coupling_distance = 0.0;  // D
};

struct AssouadBound {
  double value = 0.0;
  bool vacuous = false;  // set when the bound is non-positive
};

// (d tau / 2) (0.9 e^{-10 eps D} - 10 delta D). Negative values are returned
// as-is with the vacuous flag so sweeps can plot the transition.
AssouadBound assouad_bound(const AssouadParams& p);

struct NBound {
  double value = 0.0;
  bool delta_exceeds_eps = false;  // outside the regime the bound targets
};

// d / (50 (eps + delta) alpha^2); still evaluated when delta > eps, flagged.
NBound heavy_tailed_n_bound(double alpha, int d, double eps, double delta);

// Squared distance between the means of two spiked distributions indexed by
// sign vectors: 4 p^2 t^2 * Hamming(u, v). The per-coordinate separation is
// tau = 2 p^2 t^2.
double mixture_separation(const hard::HeavyTailedSpec& spec, std::span<const double> u,
                          std::span<const double> v);

}  // namespace fplab::assouad
