#pragma once

#include <utility>

#include "betapoly/errors.hpp"

// The one-dimensional marginal distribution function
//   F_{z-1}(h) = 2 z c_z Integral_{-1}^{h} (1 - s^2)^(z-1) ds,  h in [-1, 1],
// with c_z = Gamma(z+1/2) / (2 sqrt(pi) Gamma(z+1)), so F_{z-1}(1) = 1.
// Raising F to powers N ~ 10^85 makes the upper tail the precision-critical
// quantity, so the tail is always evaluated from the incomplete-beta tail
// integral itself, never as 1 - F.

namespace betapoly {

class FParams {
 public:
  explicit FParams(double z);  // z > 0 (model constraint z >= 1/2 not enforced here)

  double z() const { return z_; }
  double log_c() const { return log_c_; }          // log c_z
  double log_beta_fn() const { return log_beta_; }  // log B(z, 1/2)

 private:
  double z_;
  double log_c_;
  double log_beta_;
};

// F_{z-1}(h) to absolute accuracy ~1e-15; F(-1) = 0, F(0) = 1/2, F(1) = 1
// exactly. Throws domain_error for h outside [-1, 1].
double F(const FParams& params, double h);

// log(1 - F_{z-1}(h)) for h in (0, 1), full relative accuracy even when the
// tail is far below the smallest normal double (log values down to ~ -1e6).
double log_one_minus_F(const FParams& params, double h);

// The analytic envelope for the tail: with u = 1 - h^2,
//   c_z u^z / h * (1 - u / (2 h^2 (z+1)))  <=  1 - F_{z-1}(h)  <=  c_z u^z / h.
// Returned as (log lower, log upper); lower is -inf when the polynomial
// factor is non-positive.
std::pair<double, double> envelope_F_tail(const FParams& params, double h);

// Superset of log_one_minus_F over h in [-1, 1] (used by the volume
// integrand, where h ranges over the whole interval).
double log_tail_full(const FParams& params, double h);

// log(-log F_{z-1}(h)) for h in (-1, 1]; -inf at h = 1. Keeps N*log F
// relative-accurate for any magnitude of the tail.
double log_neg_log_F(const FParams& params, double h);

namespace detail {

// log of the regularized incomplete beta function I_x(a, b), a,b > 0,
// x in [0, 1]. Continued fraction (modified Lentz), switching to the
// complement side past the standard crossover.
double log_reg_inc_beta(double a, double b, double x);
double reg_inc_beta(double a, double b, double x);

}  // namespace detail

}  // namespace betapoly
