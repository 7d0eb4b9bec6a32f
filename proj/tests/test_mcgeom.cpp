#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "betapoly/betacdf.hpp"
#include "betapoly/exactvol.hpp"
#include "betapoly/mcgeom.hpp"
#include "oracles.hpp"

using namespace betapoly;

namespace {

double cross2(const double* a, const double* b, const double* c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// Orientation-based point-in-triangle test, strict interior/exterior only.
bool triangle_contains(const double* tri, const double* q) {
  const double s1 = cross2(tri, tri + 2, q);
  const double s2 = cross2(tri + 2, tri + 4, q);
  const double s3 = cross2(tri + 4, tri, q);
  const bool all_pos = s1 > 0 && s2 > 0 && s3 > 0;
  const bool all_neg = s1 < 0 && s2 < 0 && s3 < 0;
  return all_pos || all_neg;
}

}  // namespace

TEST_SUITE_BEGIN("mcgeom");

TEST_CASE("sampler: sphere case has unit norms") {
  const PointCloud cloud = sample_beta(BetaModel(5, -1.0), 2000, 7);
  for (int i = 0; i < cloud.n; ++i) {
    double norm_sq = 0.0;
    for (double v : cloud.point(i)) norm_sq += v * v;
    CHECK(std::fabs(std::sqrt(norm_sq) - 1.0) <= 1e-12);
  }
}

TEST_CASE("sampler: all norms inside the ball, moments of r^2") {
  // Uniform in the disk: E r^2 = d/(d+2) = 1/2, Var r^2 = 1/12.
  const int n = 1000000;
  const PointCloud cloud = sample_beta(BetaModel(2, 0.0), n, 20240808);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (double v : cloud.point(i)) r2 += v * v;
    CHECK(r2 <= 1.0 + 1e-12);
    sum += r2;
  }
  const double mean = sum / n;
  const double sigma = std::sqrt(1.0 / 12.0 / n);
  CHECK(std::fabs(mean - 0.5) <= 3.0 * sigma);
}

TEST_CASE("sampler: radial law 1-r^2 ~ Beta(beta+1, d/2), KS test") {
  struct Case {
    int d;
    double beta;
  };
  for (const Case c : {Case{2, 0.0}, Case{5, -0.5}, Case{3, 2.0}}) {
    const int n = 100000;
    const PointCloud cloud = sample_beta(BetaModel(c.d, c.beta), n, 99 + c.d);
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) {
      double r2 = 0.0;
      for (double v : cloud.point(i)) r2 += v * v;
      u[i] = 1.0 - r2;
    }
    const double a = c.beta + 1.0, b = 0.5 * c.d;
    const double ks = oracles::ks_statistic(
        u, [&](double x) { return detail::reg_inc_beta(a, b, std::min(std::max(x, 0.0), 1.0)); });
    INFO("d=", c.d, " beta=", c.beta, " ks=", ks);
    CHECK(ks < 1.95);  // ~0.1% level
  }
}

TEST_CASE("probe sampler fills the ball uniformly (radius law)") {
  Rng rng(5);
  const int n = 200000, d = 3;
  std::vector<double> p(d), r(n);
  for (int i = 0; i < n; ++i) {
    sample_ball_uniform(d, rng, p.data());
    double r2 = 0.0;
    for (double v : p) r2 += v * v;
    r[i] = std::sqrt(r2);
  }
  // r^d is uniform on (0,1).
  const double ks =
      oracles::ks_statistic(r, [&](double x) { return std::pow(std::min(std::max(x, 0.0), 1.0), d); });
  CHECK(ks < 1.95);
}

TEST_CASE("contains: vertices, interior combinations, planted outsiders") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int d : {2, 3, 5, 8}) {
    const int n = 2 * d + 3;
    const PointCloud cloud = sample_beta(BetaModel(d, 0.0), n, 1000 + d);
    // Every sample point is in its own hull.
    for (int i = 0; i < n; ++i) CHECK(contains(cloud, cloud.point(i)));
    // Random convex combinations are inside.
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> w(n), q(d, 0.0);
      double tot = 0.0;
      for (int i = 0; i < n; ++i) tot += (w[i] = unit(gen));
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) q[k] += w[i] / tot * cloud.point(i)[k];
      CHECK(contains(cloud, q));
    }
    // A point strictly past a supporting hyperplane is outside: take a random
    // direction, find the farthest cloud point, and step beyond it.
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> dir(d);
      double norm_sq = 0.0;
      std::normal_distribution<double> nd;
      for (int k = 0; k < d; ++k) {
        dir[k] = nd(gen);
        norm_sq += dir[k] * dir[k];
      }
      const double norm = std::sqrt(norm_sq);
      double best = -1e30;
      int arg = 0;
      for (int i = 0; i < n; ++i) {
        double dot = 0.0;
        for (int k = 0; k < d; ++k) dot += cloud.point(i)[k] * dir[k] / norm;
        if (dot > best) {
          best = dot;
          arg = i;
        }
      }
      std::vector<double> q(d);
      for (int k = 0; k < d; ++k) q[k] = cloud.point(arg)[k] + 1e-5 * dir[k] / norm;
      CHECK_FALSE(contains(cloud, q));
    }
  }
}

TEST_CASE("contains agrees with the 2-D orientation oracle") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    double tri[6], q[2];
    for (double& v : tri) v = coord(gen);
    for (double& v : q) v = coord(gen);
    // Skip near-degenerate configurations where both tests sit on the fence.
    const double area2 = std::fabs(cross2(tri, tri + 2, tri + 4));
    if (area2 < 1e-3) continue;
    PointCloud cloud{BetaModel(2, 0.0), 0, 3, {tri, tri + 6}};
    const bool oracle = triangle_contains(tri, q);
    // Reflected-centroid construction: a point mirrored across an edge
    // midpoint lands outside whenever the triangle is non-degenerate.
    if (oracle == contains(cloud, std::span<const double>(q, 2))) ++checked;
    CHECK(oracle == contains(cloud, std::span<const double>(q, 2)));
  }
  CHECK(checked > 200);
  // Explicit reflection case: centroid mirrored across edge (A,B).
  double tri[6] = {0.0, 0.0, 1.0, 0.0, 0.2, 0.9};
  PointCloud cloud{BetaModel(2, 0.0), 0, 3, {tri, tri + 6}};
  const double cen[2] = {0.4, 0.3};
  const double mirrored[2] = {cen[0], -cen[1]};
  CHECK(contains(cloud, std::span<const double>(cen, 2)));
  CHECK_FALSE(contains(cloud, std::span<const double>(mirrored, 2)));
}

TEST_CASE("wendel_probability closed forms") {
  CHECK(wendel_probability(3, 2) == doctest::Approx(0.25).epsilon(1e-13));
  for (int d = 1; d <= 30; ++d)
    CHECK(wendel_probability(d + 1, d) == doctest::Approx(std::pow(2.0, -d)).epsilon(1e-12));
  // Binomial-tail identity against a long-double Pascal sum.
  const auto c = oracles::pascal(60);
  for (int d : {3, 7, 20}) {
    const int n = 2 * d;
    long double tail = 0.0L;
    for (int k = d; k <= n - 1; ++k) tail += (long double)c[n - 1][k];
    const double expect =
        static_cast<double>(tail / std::pow(2.0L, (long double)(n - 1)));
    CHECK(wendel_probability(n, d) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(wendel_probability(3, 3), domain_error);
}

TEST_CASE("origin containment matches the symmetric-law closed form") {
  struct Case {
    int d, n;
    double beta;
  };
  for (const Case c : {Case{2, 3, 0.0}, Case{2, 4, 0.0}, Case{3, 4, -1.0}, Case{3, 6, 2.0},
                       Case{4, 7, 0.0}}) {
    const Estimate est = mc_origin_containment(BetaModel(c.d, c.beta), c.n, 40000, 31);
    const double expect = wendel_probability(c.n, c.d);
    INFO("d=", c.d, " n=", c.n, " beta=", c.beta);
    CHECK(std::fabs(est.value - expect) <= 3.0 * std::max(est.std_error, 1e-6));
  }
}

TEST_CASE("volume estimator against the closed-form simplex and the bound") {
  // d=2, beta=0, n=3: E area ratio = 35/(48 pi^2).
  const Estimate a = mc_volume_ratio(BetaModel(2, 0.0), 3, 4000, 250, 47);
  CHECK(std::fabs(a.value - 35.0 / (48.0 * M_PI * M_PI)) <= 3.0 * a.std_error);
  // Simplex estimates stay below the containment bound.
  const Estimate b = mc_volume_ratio(BetaModel(3, -1.0), 4, 2000, 200, 48);
  CHECK(b.value <= wendel_probability(4, 3) + 3.0 * b.std_error);
  // Saturation at large n, small d.
  const Estimate c = mc_volume_ratio(BetaModel(2, 0.0), 3000, 24, 60, 49);
  CHECK(c.value > 0.95);
}

TEST_CASE("vertex counter: simplex case, crude bounds, Efron consistency") {
  const Estimate simplex = mc_vertex_count(BetaModel(3, 0.0), 4, 200, 7);
  CHECK(simplex.value == 4.0);  // d+1 points are a.s. in general position
  CHECK(simplex.std_error == 0.0);
  const Estimate small = mc_vertex_count(BetaModel(2, 0.0), 10, 400, 8);
  CHECK(small.value > 3.0);
  CHECK(small.value < 10.0);
  CHECK_THROWS_AS(mc_vertex_count(BetaModel(3, 1.0), 10, 10, 1), domain_error);
  // E f0(n) = n (1 - E vol ratio with n-1 points) for uniform sampling.
  const BetaModel m(3, 0.0);
  const Estimate f0 = mc_vertex_count(m, 20, 2500, 9);
  const double prev = expected_volume_ratio(m, SampleSize::exact(19), 1e-9).ratio;
  const double prediction = 20.0 * (1.0 - prev);
  CHECK(std::fabs(f0.value - prediction) <= 3.0 * f0.std_error);
}

TEST_CASE("estimators are bit-reproducible and worker-count independent") {
  const BetaModel m(3, 0.0);
  const Estimate a = mc_volume_ratio(m, 8, 300, 40, 123, 1);
  const Estimate b = mc_volume_ratio(m, 8, 300, 40, 123, 2);
  const Estimate c = mc_volume_ratio(m, 8, 300, 40, 123, 0);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK(a.value == c.value);
  const Estimate d2 = mc_volume_ratio(m, 8, 300, 40, 124);
  CHECK(a.value != d2.value);  // different seed, different stream
  const Estimate o1 = mc_origin_containment(m, 5, 5000, 55, 1);
  const Estimate o2 = mc_origin_containment(m, 5, 5000, 55, 2);
  CHECK(o1.value == o2.value);
  const Estimate v1 = mc_vertex_count(m, 9, 500, 66, 1);
  const Estimate v2 = mc_vertex_count(m, 9, 500, 66, 2);
  CHECK(v1.value == v2.value);
  CHECK(v1.std_error == v2.std_error);
}

TEST_CASE("input validation") {
  const BetaModel m(3, 0.0);
  CHECK_THROWS_AS(mc_volume_ratio(m, 3, 10, 10, 1), domain_error);
  CHECK_THROWS_AS(mc_volume_ratio(m, 5, 0, 10, 1), domain_error);
  CHECK_THROWS_AS(mc_origin_containment(m, 3, 10, 1), domain_error);
  CHECK_THROWS_AS(sample_beta(m, 0, 1), domain_error);
  const PointCloud cloud = sample_beta(m, 5, 1);
  const std::vector<double> wrong_dim(2, 0.0);
  CHECK_THROWS_AS(contains(cloud, wrong_dim), domain_error);
}

TEST_SUITE_END();
