#pragma once

#include <cstdint>

// Brute-force numerical counterparts of the closed-form effective-loss
// inversions. They share no code with the closed forms.

namespace hopcap {

// Solves q = u^2 + (1 - u)/n on [1/n, 1] by bisection.
[[nodiscard]] double oracle_invert_recurrent(double q, std::uint64_t n);

struct TwoFunctionOptimum {
  double hop1_prob = 0.0;
  double hop2_prob = 0.0;
  double summed_loss_nats = 0.0;  // -ln p1 - ln p2
};

// Searches p1 over [1/n, 1] (p2 solved from the constraint) for the feasible
// point with the smallest product p1*p2, i.e. the largest summed hop loss
// compatible with q: log grid, then golden-section refinement.
[[nodiscard]] TwoFunctionOptimum oracle_minimize_two_function(double q, std::uint64_t n);

}  // namespace hopcap
