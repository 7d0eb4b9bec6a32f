#pragma once

#include <utility>

// Phase-transition maps for the normalized volume of beta polytopes. The
// critical sample size is n = (d/2x)^(d/2+beta); along that curve the
// normalized volume converges to e^(-x) as d grows, which gives a
// closed-form predictor and its inverse.

namespace betapoly {

// log n on the critical curve: (d/2 + beta) * log(d / (2x)). Requires
// 0 < 2x < d.
double threshold_log_n(int d, double beta, double x);

// Inverse map: x = (d/2) * exp(-2 log n / (d + 2 beta)). Requires log_n > 0.
double x_of(int d, double beta, double log_n);

// Limiting predictor exp(-x_of(d, beta, log_n)). Pointwise output; carries a
// limit claim only along sequences where the inner expression converges.
double predicted_ratio(int d, double beta, double log_n);

// The concentration window (a, b) in (0,1) with D = (d+1)/2:
//   a = sqrt(1 - (x/D) (1 + log(D^2 (D+beta)) / (D+beta))),  b = sqrt(1 - x/D).
// Requires D > x and a positive radicand for a.
std::pair<double, double> window(int d, double beta, double x);

}  // namespace betapoly
