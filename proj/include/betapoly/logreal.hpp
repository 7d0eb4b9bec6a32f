#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "betapoly/errors.hpp"

// Extended-range arithmetic on non-negative reals kept as natural logs.
// Everything downstream (binomials of astronomical n, c_z^(d+1), powers
// F^N with N ~ 10^85) lives in this representation; quantities are only
// exponentiated at the very end, if at all.

namespace betapoly {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b) without overflow. -inf is the additive identity.
double log_add(double a, double b);

// log(1 - h^2) keeping full relative precision near |h| = 1, where 1 - |h|
// is exact (Sterbenz) while 1 - h*h rounds away entirely.
inline double log_one_minus_sq(double h) {
  const double a = std::fabs(h);
  if (a <= 0.5) return std::log1p(-h * h);
  return std::log((1.0 - a) * (1.0 + a));
}

// A non-negative real stored as its natural log. -inf encodes zero; +inf and
// NaN are rejected (overflow past the representable log range is treated as
// an internal error, not a value).
class LogReal {
 public:
  LogReal() : log_value_(kNegInf) {}

  static LogReal from_log(double log_value);
  static LogReal from_value(double value);  // value >= 0

  double log_value() const { return log_value_; }
  double value() const;  // may underflow/overflow to 0/inf in linear scale
  bool is_zero() const { return log_value_ == kNegInf; }

  friend LogReal operator+(LogReal a, LogReal b) {
    return LogReal::from_log(log_add(a.log_value_, b.log_value_));
  }
  friend LogReal operator*(LogReal a, LogReal b);
  friend bool operator<(LogReal a, LogReal b) { return a.log_value_ < b.log_value_; }
  friend bool operator==(LogReal a, LogReal b) { return a.log_value_ == b.log_value_; }

 private:
  explicit LogReal(double lv) : log_value_(lv) {}
  double log_value_;
};

// log Gamma(z) for z > 0, Lanczos approximation, relative accuracy ~1e-15 on
// the Gamma value itself. Throws domain_error for z <= 0.
double log_gamma(double z);

// log of the unit-ball volume, log(pi^(d/2) / Gamma(1 + d/2)).
double log_kappa(int d);

// log of Gamma(z+1/2)/Gamma(z+1). The plain difference of log-Gammas loses
// absolute accuracy ~|log Gamma| * eps, too coarse for the 1/sqrt(z) envelope
// once z is large, so past 1e5 this switches to a Stirling-difference form
// accurate to a few ulps of the ratio's log.
double log_gamma_half_ratio(double z);

// log c_z with c_z = Gamma(z + 1/2) / (2 sqrt(pi) Gamma(z + 1)), z > 0.
double log_c(double z);

// A sample size that is either an exact integer or known only through its
// log. The regimes of interest have n ~ (d/2x)^(d/2+beta) ~ 10^85 at d = 100,
// so every consumer must accept both forms.
class SampleSize {
 public:
  static SampleSize exact(std::uint64_t n);
  static SampleSize from_log(double log_n);

  bool has_exact() const { return exact_.has_value(); }
  std::uint64_t exact_n() const;  // throws if not exact
  double log_n() const { return log_n_; }

  // n - k as a SampleSize (exact stays exact). Throws domain_error if the
  // difference is not positive.
  SampleSize minus(std::uint64_t k) const;

  // True when n >= threshold, decidable for both representations.
  bool at_least(std::uint64_t threshold) const;

 private:
  SampleSize(std::optional<std::uint64_t> e, double l) : exact_(e), log_n_(l) {}
  std::optional<std::uint64_t> exact_;
  double log_n_;
};

// log C(n, k). Exact n goes through log_gamma; log-only n uses
// k*log(n) - log(k!), whose relative error is O(k^2/n) (negligible in the
// super-exponential regimes this is meant for).
double log_binomial(const SampleSize& n, std::uint64_t k);

}  // namespace betapoly
