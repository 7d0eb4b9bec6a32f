#pragma once

#include <string>

#include "betapoly/errors.hpp"

namespace betapoly {

// The (d, beta) pair identifying a beta polytope model: n i.i.d. points in
// the unit d-ball with density proportional to (1 - |x|^2)^beta for
// beta > -1, or uniform on the unit sphere for beta = -1.
struct BetaModel {
  int d;
  double beta;

  BetaModel(int d_, double beta_) : d(d_), beta(beta_) {
    if (d < 2) throw domain_error("BetaModel: d must be >= 2, got " + std::to_string(d));
    if (!(beta >= -1.0))
      throw domain_error("BetaModel: beta must be >= -1, got " + std::to_string(beta));
  }

  double D() const { return 0.5 * (d + 1); }
  double z() const { return D() + beta; }  // >= 1/2 given d >= 2, beta >= -1
};

}  // namespace betapoly
