#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "betapoly/model.hpp"
#include "betapoly/rng.hpp"

// Monte Carlo ground truth for the analytic machinery: beta sampling in the
// ball / on the sphere, convex-hull membership by phase-one linear
// feasibility, hit-or-miss volume, vertex counts, and the closed-form
// origin-containment probability for symmetric laws.

namespace betapoly {

struct PointCloud {
  BetaModel model;
  std::uint64_t seed;
  int n;
  std::vector<double> coords;  // row-major n x d

  std::span<const double> point(int i) const {
    return {coords.data() + static_cast<std::size_t>(i) * model.d,
            static_cast<std::size_t>(model.d)};
  }
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

// n i.i.d. beta-distributed points: direction uniform on the sphere
// (normalized Gaussian), squared radius Beta(d/2, beta+1) for beta > -1;
// beta = -1 puts the points exactly on the sphere.
PointCloud sample_beta(const BetaModel& model, int n, std::uint64_t seed);

// Fills out[0..n*d) using the caller's stream; shared by the estimators.
void sample_beta_into(const BetaModel& model, int n, Rng& rng, double* out);

// One uniform point in the unit ball (radius U^(1/d) times a uniform
// direction), the probe law of the hit-or-miss estimator.
void sample_ball_uniform(int d, Rng& rng, double* out);

// query in conv(points)? Decided by a phase-one simplex solve for
// lambda >= 0, sum lambda = 1, sum lambda X_i = query, residual tolerance
// 1e-9. Throws solver_error when the solve breaks down.
bool contains(const PointCloud& cloud, std::span<const double> query);

namespace detail {
// Core membership test on raw buffers; skip ignores one column (used by the
// vertex counter to test a point against the hull of the others).
bool hull_contains(int d, int n, const double* points, const double* query, int skip = -1);
}  // namespace detail

// Hit-or-miss estimate of E vol_d / kappa_d: polytope_trials hull draws,
// probe_trials uniform-in-ball probes per hull. std_error is the
// between-trial deviation of per-hull hit fractions (which absorbs the
// binomial probe noise).
Estimate mc_volume_ratio(const BetaModel& model, int n, int polytope_trials,
                         int probe_trials, std::uint64_t seed, int workers = 0);

// Expected vertex count E f_0 for beta = 0 (the only case the identity
// E f_0 = n P(X_n is a vertex) reduces to a volume ratio).
Estimate mc_vertex_count(const BetaModel& model, int n, int trials, std::uint64_t seed,
                         int workers = 0);

// The closed-form bound 2^{-(n-1)} sum_{k=d}^{n-1} C(n-1,k): for symmetric
// absolutely continuous laws this is exactly P(0 in hull of n points).
double wendel_probability(std::int64_t n, int d);

// Fraction of sampled hulls containing the origin.
Estimate mc_origin_containment(const BetaModel& model, int n, int trials,
                               std::uint64_t seed, int workers = 0);

}  // namespace betapoly
