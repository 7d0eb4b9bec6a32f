#pragma once

#include <utility>

#include "betapoly/exactvol.hpp"

// Expected intrinsic-volume ratios through the dimension-reduction identity
//   E V_k(P^beta_{n,d}) / V_k(B^d) = E vol_k(P^beta'_{n,k}) / vol_k(B^k),
// with beta' = (d-k)/2 + beta. The same n is kept across the reduction.

namespace betapoly {

// log V_k(B^d) = log[ C(d,k) kappa_d / kappa_{d-k} ], 0 <= k <= d.
double log_Vk_ball(int d, int k);

// The reduced model (d', beta') = (k, (d-k)/2 + beta), 1 <= k <= d.
std::pair<int, double> reduce(int d, int k, double beta);

// Delegates to expected_volume_ratio on the reduced model; k = d is the
// identity reduction and shares the code path bit for bit.
VolumeResult expected_intrinsic_ratio(int d, int k, double beta, const SampleSize& size,
                                      double rel_tol);

}  // namespace betapoly
