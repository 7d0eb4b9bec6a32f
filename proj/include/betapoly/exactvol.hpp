#pragma once

#include <optional>
#include <string>

#include "betapoly/logreal.hpp"
#include "betapoly/model.hpp"

// Exact expected normalized volume of a beta polytope,
//   E vol_d / kappa_d = (K / kappa_d) * Integral_{-1}^{1} (1-h^2)^q F_{z-1}(h)^N dh,
// with N = n - d - 1, D = (d+1)/2, z = D + beta,
//   K / kappa_d = 4 D z * C(n, d+1) * c_z^(d+1),
//   q = (d+1)(beta - 1/2) + d(d+3)/2 = 2 D z - 1.
// Everything is evaluated in the log domain; the integral is done by an
// adaptive nested quadrature that either covers [-1,1] directly or tracks
// the sharply concentrated mode through an expanding window.

namespace betapoly {

struct NormalizationConstants {
  double log_K_over_kappa;
  double q;
};

enum class QuadMethod { direct, laplace_window };

const char* to_string(QuadMethod m);

struct QuadratureReport {
  double log_integral = kNegInf;
  std::optional<double> mode_h;  // interior maximum of the integrand, if any
  double window_lo = -1.0;
  double window_hi = 1.0;
  int nodes_used = 0;
  double rel_error_estimate = 0.0;
  QuadMethod method = QuadMethod::direct;
};

struct VolumeResult {
  double ratio;      // in [0,1]; underflows to 0 in linear scale for large d
  double log_ratio;  // log_K_over_kappa + log_integral, always meaningful
  QuadratureReport report;
};

NormalizationConstants constants(const BetaModel& model, const SampleSize& size);

// Log of the integrand g(h) = q log(1-h^2) + N log F_{z-1}(h), |h| < 1.
// -inf is allowed (F = 0, or N log F below the representable range).
double log_integrand(const BetaModel& model, const SampleSize& size, double h);

// Location h* in (0,1) of the interior maximum of g, from the stationarity
// condition 2 q h / (1-h^2) = N f(h) / F(h), solved by bisection on the log
// ratio of the two sides. Returns nullopt when g is maximal at h <= 0
// (N = 0, or N too small against q).
std::optional<double> find_mode(const BetaModel& model, const SampleSize& size);

// The expected volume ratio with a quadrature report. rel_tol must lie in
// (1e-12, 1e-2). Throws tolerance_error (carrying the best log estimate)
// when the requested accuracy cannot be certified.
VolumeResult expected_volume_ratio(const BetaModel& model, const SampleSize& size,
                                   double rel_tol);

// Closed form for n = d+1 (N = 0):
//   ratio = (K/kappa_d) sqrt(pi) Gamma(2Dz) / Gamma(2Dz + 1/2).
// Used as a regression oracle for the quadrature path.
double closed_form_simplex_ratio(const BetaModel& model);
double log_closed_form_simplex_ratio(const BetaModel& model);

}  // namespace betapoly
