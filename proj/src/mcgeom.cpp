#include "betapoly/mcgeom.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "betapoly/logreal.hpp"

namespace betapoly {

namespace {

constexpr double kFeasTol = 1e-9;    // residual below which the query is inside
constexpr double kPivotTol = 1e-11;  // entries below this never pivot

// Phase-one simplex on the feasibility system
//   sum_j lambda_j X_j = q,  sum_j lambda_j = 1,  lambda >= 0,
// with one artificial variable per row. Dantzig pricing at first, Bland's
// rule once the iteration count suggests stalling.
bool phase_one_feasible(int d, int n_cols, const double* pts, const double* q, int skip,
                        std::vector<double>& tab, std::vector<int>& basis) {
  const int m = d + 1;
  const int n = skip >= 0 ? n_cols - 1 : n_cols;
  const int width = n + m + 1;
  const int rhs = n + m;
  tab.assign(static_cast<std::size_t>(m + 1) * width, 0.0);
  basis.assign(m, 0);

  auto row = [&](int i) { return tab.data() + static_cast<std::size_t>(i) * width; };

  for (int j = 0, col = 0; j < n_cols; ++j) {
    if (j == skip) continue;
    const double* p = pts + static_cast<std::size_t>(j) * d;
    for (int i = 0; i < d; ++i) row(i)[col] = p[i];
    row(d)[col] = 1.0;
    ++col;
  }
  for (int i = 0; i < d; ++i) row(i)[rhs] = q[i];
  row(d)[rhs] = 1.0;
  for (int i = 0; i < m; ++i) {
    if (row(i)[rhs] < 0.0)
      for (int j = 0; j <= rhs; ++j) row(i)[j] = -row(i)[j];
    row(i)[n + i] = 1.0;
    basis[i] = n + i;
  }
  // Reduced-cost row for min sum(artificials): artificial columns price to 0.
  double* cost = row(m);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += row(i)[j];
    cost[j] = -s;
  }
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += row(i)[rhs];
  cost[rhs] = -s;  // = -(current objective)

  const int bland_after = 50 + 10 * m;
  const int max_iter = 2000 + 50 * (n + m);
  for (int iter = 0;; ++iter) {
    if (iter > max_iter)
      throw solver_error("hull membership: simplex exceeded " + std::to_string(max_iter) +
                         " iterations (d=" + std::to_string(d) + ", n=" + std::to_string(n) +
                         ")");
    const bool bland = iter >= bland_after;
    int enter = -1;
    double best = -kPivotTol;
    for (int j = 0; j < n + m; ++j) {
      const double c = cost[j];
      if (c < best) {
        enter = j;
        if (bland) break;
        best = c;
      }
    }
    if (enter < 0) break;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = row(i)[enter];
      if (a > kPivotTol) {
        const double r = row(i)[rhs] / a;
        if (r < best_ratio - 1e-12 ||
            (r < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = r;
          leave = i;
        }
      }
    }
    if (leave < 0)
      throw solver_error("hull membership: unbounded phase-one column (numerical breakdown)");

    double* pr = row(leave);
    const double inv = 1.0 / pr[enter];
    for (int j = 0; j <= rhs; ++j) pr[j] *= inv;
    pr[enter] = 1.0;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double* ri = row(i);
      const double f = ri[enter];
      if (f == 0.0) continue;
      for (int j = 0; j <= rhs; ++j) ri[j] -= f * pr[j];
      ri[enter] = 0.0;
    }
    basis[leave] = enter;
  }
  return -cost[rhs] <= kFeasTol;
}

// Deterministic chunked parallel driver: chunk c covers trials
// [c*chunk, min(total, (c+1)*chunk)) with its own stream seeded by
// stable_hash(seed, c); results are reduced in chunk order afterwards, so
// the outcome does not depend on the worker count.
template <typename ChunkFn>
void run_chunks(std::int64_t total, int chunk_size, int workers, ChunkFn fn) {
  const std::int64_t nchunks = (total + chunk_size - 1) / chunk_size;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (workers > nchunks) workers = static_cast<int>(nchunks);

  std::atomic<std::int64_t> next{0};
  std::atomic<std::int64_t> completed{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto work = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      const std::int64_t b = c * chunk_size;
      const std::int64_t e = std::min(total, b + chunk_size);
      try {
        fn(c, b, e);
        completed.fetch_add(1);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const std::exception& e) {
      throw solver_error("monte carlo aborted after " + std::to_string(completed.load()) +
                         "/" + std::to_string(nchunks) + " chunks: " + e.what());
    }
  }
}

struct MomentAcc {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t count = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
};

Estimate finish(const std::vector<MomentAcc>& slots, std::uint64_t seed) {
  MomentAcc all;
  for (const MomentAcc& s : slots) {  // fixed order: bit-reproducible
    all.sum += s.sum;
    all.sum_sq += s.sum_sq;
    all.count += s.count;
  }
  Estimate est;
  est.trials = all.count;
  est.seed = seed;
  est.value = all.sum / static_cast<double>(all.count);
  if (all.count > 1) {
    const double var =
        (all.sum_sq - all.sum * all.sum / static_cast<double>(all.count)) /
        static_cast<double>(all.count - 1);
    est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(all.count));
  }
  return est;
}

}  // namespace

namespace detail {

bool hull_contains(int d, int n, const double* points, const double* query, int skip) {
  thread_local std::vector<double> tab;
  thread_local std::vector<int> basis;
  return phase_one_feasible(d, n, points, query, skip, tab, basis);
}

}  // namespace detail

void sample_beta_into(const BetaModel& model, int n, Rng& rng, double* out) {
  const int d = model.d;
  for (int i = 0; i < n; ++i) {
    double* p = out + static_cast<std::size_t>(i) * d;
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (int k = 0; k < d; ++k) {
        p[k] = rng.normal();
        norm_sq += p[k] * p[k];
      }
    } while (norm_sq == 0.0);
    double r = 1.0;
    if (model.beta > -1.0) r = std::sqrt(rng.beta(0.5 * d, model.beta + 1.0));
    const double scale = r / std::sqrt(norm_sq);
    for (int k = 0; k < d; ++k) p[k] *= scale;
  }
}

void sample_ball_uniform(int d, Rng& rng, double* out) {
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (int k = 0; k < d; ++k) {
      out[k] = rng.normal();
      norm_sq += out[k] * out[k];
    }
  } while (norm_sq == 0.0);
  const double scale = std::pow(rng.uniform(), 1.0 / d) / std::sqrt(norm_sq);
  for (int k = 0; k < d; ++k) out[k] *= scale;
}

PointCloud sample_beta(const BetaModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw domain_error("sample_beta: n must be >= 1");
  PointCloud cloud{model, seed, n, {}};
  cloud.coords.resize(static_cast<std::size_t>(n) * model.d);
  Rng rng(stable_hash(seed, 0));
  sample_beta_into(model, n, rng, cloud.coords.data());
  return cloud;
}

bool contains(const PointCloud& cloud, std::span<const double> query) {
  if (cloud.n < 1) throw domain_error("contains: cloud is empty");
  if (query.size() != static_cast<std::size_t>(cloud.model.d))
    throw domain_error("contains: query dimension mismatch");
  return detail::hull_contains(cloud.model.d, cloud.n, cloud.coords.data(), query.data());
}

Estimate mc_volume_ratio(const BetaModel& model, int n, int polytope_trials,
                         int probe_trials, std::uint64_t seed, int workers) {
  if (n < model.d + 1) throw domain_error("mc_volume_ratio: need n >= d+1");
  if (polytope_trials < 1 || probe_trials < 1)
    throw domain_error("mc_volume_ratio: trial counts must be positive");
  const int chunk = 16;
  const std::int64_t nchunks = (polytope_trials + chunk - 1) / chunk;
  std::vector<MomentAcc> slots(nchunks);
  run_chunks(polytope_trials, chunk, workers,
             [&](std::int64_t c, std::int64_t b, std::int64_t e) {
               Rng rng(stable_hash(seed, static_cast<std::uint64_t>(c)));
               std::vector<double> cloud(static_cast<std::size_t>(n) * model.d);
               std::vector<double> probe(model.d);
               for (std::int64_t t = b; t < e; ++t) {
                 sample_beta_into(model, n, rng, cloud.data());
                 int hits = 0;
                 for (int p = 0; p < probe_trials; ++p) {
                   sample_ball_uniform(model.d, rng, probe.data());
                   if (detail::hull_contains(model.d, n, cloud.data(), probe.data()))
                     ++hits;
                 }
                 slots[c].add(static_cast<double>(hits) / probe_trials);
               }
             });
  return finish(slots, seed);
}

Estimate mc_vertex_count(const BetaModel& model, int n, int trials, std::uint64_t seed,
                         int workers) {
  if (model.beta != 0.0)
    throw domain_error("mc_vertex_count: the vertex identity requires beta = 0");
  if (n < model.d + 1) throw domain_error("mc_vertex_count: need n >= d+1");
  if (trials < 1) throw domain_error("mc_vertex_count: trials must be positive");
  const int chunk = 16;
  const std::int64_t nchunks = (trials + chunk - 1) / chunk;
  std::vector<MomentAcc> slots(nchunks);
  run_chunks(trials, chunk, workers, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    Rng rng(stable_hash(seed, static_cast<std::uint64_t>(c)));
    std::vector<double> cloud(static_cast<std::size_t>(n) * model.d);
    for (std::int64_t t = b; t < e; ++t) {
      sample_beta_into(model, n, rng, cloud.data());
      int vertices = 0;
      for (int j = 0; j < n; ++j) {
        const double* xj = cloud.data() + static_cast<std::size_t>(j) * model.d;
        if (!detail::hull_contains(model.d, n, cloud.data(), xj, j)) ++vertices;
      }
      slots[c].add(static_cast<double>(vertices));
    }
  });
  return finish(slots, seed);
}

double wendel_probability(std::int64_t n, int d) {
  if (d < 1 || n <= d) throw domain_error("wendel_probability: need n > d >= 1");
  constexpr double kLog2 = 0.69314718055994530941723212145818;
  const SampleSize rows = SampleSize::exact(static_cast<std::uint64_t>(n - 1));
  // Sum whichever binomial tail has fewer terms; they are complementary.
  if (n - 1 - d < d) {
    double acc = kNegInf;
    for (std::int64_t k = d; k <= n - 1; ++k)
      acc = log_add(acc, log_binomial(rows, static_cast<std::uint64_t>(k)));
    const double v = std::exp(acc - (n - 1) * kLog2);
    return v > 1.0 ? 1.0 : v;
  }
  double acc = kNegInf;
  for (std::int64_t k = 0; k < d; ++k)
    acc = log_add(acc, log_binomial(rows, static_cast<std::uint64_t>(k)));
  const double log_lower = acc - (n - 1) * kLog2;  // <= log(1/2)
  return -std::expm1(log_lower);
}

Estimate mc_origin_containment(const BetaModel& model, int n, int trials,
                               std::uint64_t seed, int workers) {
  if (n <= model.d) throw domain_error("mc_origin_containment: need n > d");
  if (trials < 1) throw domain_error("mc_origin_containment: trials must be positive");
  const int chunk = 256;
  const std::int64_t nchunks = (trials + chunk - 1) / chunk;
  std::vector<MomentAcc> slots(nchunks);
  run_chunks(trials, chunk, workers, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    Rng rng(stable_hash(seed, static_cast<std::uint64_t>(c)));
    std::vector<double> cloud(static_cast<std::size_t>(n) * model.d);
    const std::vector<double> origin(model.d, 0.0);
    for (std::int64_t t = b; t < e; ++t) {
      sample_beta_into(model, n, rng, cloud.data());
      slots[c].add(
          detail::hull_contains(model.d, n, cloud.data(), origin.data()) ? 1.0 : 0.0);
    }
  });
  return finish(slots, seed);
}

}  // namespace betapoly
