#include "betapoly/rng.hpp"

#include <cmath>

#include "betapoly/errors.hpp"

namespace betapoly {

std::uint64_t stable_hash(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the combined state.
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

double Rng::gamma(double alpha) {
  if (!(alpha > 0.0)) throw domain_error("Rng::gamma: alpha must be > 0");
  if (alpha < 1.0) {
    // Boost: Gamma(alpha) = Gamma(alpha+1) * U^(1/alpha).
    return gamma(alpha + 1.0) * std::pow(uniform(), 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

}  // namespace betapoly
