#pragma once

#include <cstdint>
#include <random>

// Deterministic sampling primitives. The engine is the standard-specified
// mt19937_64; the distributions are implemented here (rather than taken from
// <random>) so that a (seed, chunk) pair reproduces bit-identical streams on
// every platform and library version.

namespace betapoly {

// Stable 64-bit mix of (seed, index), used to derive per-chunk seeds.
std::uint64_t stable_hash(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on (0,1), strictly inside.
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();               // Box-Muller, pairs cached
  double gamma(double alpha);    // Marsaglia-Tsang, alpha > 0
  double beta(double a, double b);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace betapoly
