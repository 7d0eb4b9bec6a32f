#include "betapoly/exactvol.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "betapoly/asympt.hpp"
#include "betapoly/betacdf.hpp"

namespace betapoly {

namespace {

constexpr double kLogPi = 1.1447298858494001741434273513531;

// N = n - d - 1, possibly zero, possibly astronomical.
struct BigCount {
  bool is_zero;
  double log_value;  // -inf when zero
};

BigCount derive_count(const BetaModel& model, const SampleSize& size) {
  const double dp1 = model.d + 1.0;
  if (size.has_exact()) {
    const std::uint64_t n = size.exact_n();
    if (n < static_cast<std::uint64_t>(model.d) + 1)
      throw domain_error("sample size must satisfy n >= d+1");
    const std::uint64_t N = n - static_cast<std::uint64_t>(model.d) - 1;
    if (N == 0) return {true, kNegInf};
    return {false, std::log(static_cast<double>(N))};
  }
  if (!(size.log_n() > std::log(dp1)))
    throw domain_error("log n must exceed log(d+1)");
  const double r = dp1 * std::exp(-size.log_n());  // < 1 by the check above
  return {false, size.log_n() + std::log1p(-r)};
}

// The log integrand and the pieces the mode equation needs, with the
// F-distribution constants cached once.
class Integrand {
 public:
  Integrand(const BetaModel& model, const SampleSize& size)
      : params_(model.z()),
        q_((model.d + 1) * (model.beta - 0.5) + 0.5 * model.d * (model.d + 3)),
        count_(derive_count(model, size)) {}

  const FParams& params() const { return params_; }
  double q() const { return q_; }
  const BigCount& count() const { return count_; }

  // N * log F(h) as a plain (very negative) double, -inf when it falls
  // below the representable exponent range.
  double n_log_F(double h) const {
    if (count_.is_zero) return 0.0;
    const double lnl = log_neg_log_F(params_, h);  // log(-log F)
    if (lnl == kNegInf) return 0.0;                // F == 1 (unreachable for h < 1)
    const double s = count_.log_value + lnl;
    if (s > 709.0) return kNegInf;
    return -std::exp(s);
  }

  double g(double h) const {
    if (!(h > -1.0) || !(h < 1.0)) return kNegInf;  // q > 0 kills the endpoints
    const double base = q_ * log_one_minus_sq(h);
    const double tail = n_log_F(h);
    if (tail == kNegInf) return kNegInf;
    return base + tail;
  }

 private:
  FParams params_;
  double q_;
  BigCount count_;
};

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15 pair, log-domain panels.

constexpr double kXgk[8] = {
    0.99145537112081263920685469752633, 0.94910791234275852452618968404785,
    0.86486442335976907278971278864093, 0.74153118559939443986386477328079,
    0.58608723546769113029414483825873, 0.40584515137739716690660641207696,
    0.20778495500789846760068940377324, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922496373200805897, 0.06309209262997855329070066318920,
    0.10479001032225018383987632254152, 0.14065325971552591874518959051024,
    0.16900472663926790282658342659855, 0.19035057806478540991325640242101,
    0.20443294007529889241416199923465, 0.20948214108472782801299917489171};
constexpr double kWg[4] = {
    0.12948496616886969327061143267908, 0.27970539148927666790146777142378,
    0.38183005050511894495036977548898, 0.41795918367346938775510204081633};

struct Panel {
  double lo, hi;
  double log_val;     // log of the K15 estimate
  double log_err;     // log |K15 - G7|
  double log_noise2;  // log of the squared node-placement noise
};

// Nodes in ascending position order: indices into gv[] and kWgk[].
constexpr int kOrder[15] = {0, 2, 4, 6, 8, 10, 12, 14, 13, 11, 9, 7, 5, 3, 1};
constexpr int kWeightOf[15] = {0, 1, 2, 3, 4, 5, 6, 7, 6, 5, 4, 3, 2, 1, 0};

Panel eval_panel(const std::function<double(double)>& g, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double hw = 0.5 * (hi - lo);
  double gv[15], pos[15];
  for (int i = 0; i < 7; ++i) {
    pos[2 * i] = c - hw * kXgk[i];
    pos[2 * i + 1] = c + hw * kXgk[i];
    gv[2 * i] = g(pos[2 * i]);
    gv[2 * i + 1] = g(pos[2 * i + 1]);
  }
  pos[14] = c;
  gv[14] = g(c);
  double m = kNegInf;
  for (double v : gv) m = std::max(m, v);
  if (m == kNegInf) return {lo, hi, kNegInf, kNegInf, kNegInf};
  double sk = 0.0, sg = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double pair = std::exp(gv[2 * i] - m) + std::exp(gv[2 * i + 1] - m);
    sk += kWgk[i] * pair;
    if (i % 2 == 1) sg += kWg[i / 2] * pair;  // G7 shares nodes 1,3,5
  }
  const double centre = std::exp(gv[14] - m);
  sk += kWgk[7] * centre;
  sg += kWg[3] * centre;
  // Node positions are rounded to the double grid, so each sampled value is
  // off by ~|g'| ulp(pos); embedded-rule differences cannot see this. Model
  // it as independent per-node errors (summed in squares), slopes from
  // neighbouring nodes.
  double noise2 = 0.0;
  for (int k = 0; k < 15; ++k) {
    const double vk = gv[kOrder[k]];
    if (vk == kNegInf) continue;
    double slope = 0.0;
    if (k > 0 && gv[kOrder[k - 1]] != kNegInf)
      slope = std::fabs((vk - gv[kOrder[k - 1]]) / (pos[kOrder[k]] - pos[kOrder[k - 1]]));
    if (k + 1 < 15 && gv[kOrder[k + 1]] != kNegInf)
      slope = std::max(slope, std::fabs((gv[kOrder[k + 1]] - vk) /
                                        (pos[kOrder[k + 1]] - pos[kOrder[k]])));
    const double ulp_pos = 2.3e-16 * std::max(1.0, std::fabs(pos[kOrder[k]]));
    const double contrib = kWgk[kWeightOf[kOrder[k]]] * std::exp(vk - m) * slope * ulp_pos;
    noise2 += contrib * contrib;
  }
  const double diff = std::fabs(sk - sg);
  const double lhw = std::log(hw);
  return {lo, hi, m + std::log(sk) + lhw,
          diff > 0.0 ? m + std::log(diff) + lhw : kNegInf,
          noise2 > 0.0 ? 2.0 * (m + lhw) + std::log(noise2) : kNegInf};
}

struct QuadTotals {
  double log_val = kNegInf;
  double log_err = kNegInf;
  double log_noise2 = kNegInf;

  // Truncation estimate plus three sigma of the modelled placement noise.
  double log_combined() const {
    if (log_noise2 == kNegInf) return log_err;
    return log_add(log_err, 0.5 * log_noise2 + std::log(3.0));
  }
};

QuadTotals totals_of(const std::vector<Panel>& panels) {
  QuadTotals t;
  for (const Panel& p : panels) {
    t.log_val = log_add(t.log_val, p.log_val);
    t.log_err = log_add(t.log_err, p.log_err);
    t.log_noise2 = log_add(t.log_noise2, p.log_noise2);
  }
  return t;
}

// Bisect the dominant-error panels until the combined error estimate drops
// below rel_tol of the summed value. Returns false when the node budget or
// the width floor is hit first. Splitting also shrinks the noise component
// (each node's contribution scales with the panel width).
bool refine(const std::function<double(double)>& g, std::vector<Panel>& panels,
            double rel_tol, int max_nodes, int& nodes) {
  const double log_tol = std::log(rel_tol);
  const double log3 = std::log(3.0);
  for (;;) {
    const QuadTotals t = totals_of(panels);
    const double combined = t.log_combined();
    if (combined == kNegInf || combined <= t.log_val + log_tol) return true;
    if (nodes >= max_nodes) return false;
    // Split every panel carrying at least the average share of the combined
    // error.
    const double thr = combined - std::log(static_cast<double>(panels.size()));
    std::vector<Panel> next;
    next.reserve(panels.size() + 16);
    bool split_any = false;
    for (const Panel& p : panels) {
      const double width_floor = 1e-15 * std::max({1.0, std::fabs(p.lo), std::fabs(p.hi)});
      const double p_combined =
          p.log_noise2 == kNegInf ? p.log_err
                                  : log_add(p.log_err, 0.5 * p.log_noise2 + log3);
      if (p_combined >= thr && p.hi - p.lo > width_floor) {
        const double mid = 0.5 * (p.lo + p.hi);
        next.push_back(eval_panel(g, p.lo, mid));
        next.push_back(eval_panel(g, mid, p.hi));
        nodes += 30;
        split_any = true;
      } else {
        next.push_back(p);
      }
    }
    if (!split_any) return false;  // everything at the width floor
    panels.swap(next);
  }
}

void seed_panels(const std::function<double(double)>& g, const std::vector<double>& raw_pts,
                 double lo, double hi, std::vector<Panel>& panels, int& nodes) {
  std::vector<double> pts;
  pts.push_back(lo);
  for (double p : raw_pts)
    if (p > lo && p < hi) pts.push_back(p);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] - pts[i] < 1e-16 * std::max(1.0, std::fabs(pts[i]))) continue;
    panels.push_back(eval_panel(g, pts[i], pts[i + 1]));
    nodes += 15;
  }
}

// ---------------------------------------------------------------------------
// Mode of g on (0,1): bisection on the sign of
//   phi(h) = log[N f(h) / F(h)] - log[2 q h / (1-h^2)],
// which is the log ratio of the rising and falling parts of g'.

std::optional<double> find_mode_impl(const Integrand& I) {
  if (I.count().is_zero) return std::nullopt;
  const double z = I.params().z();
  const double head =
      I.count().log_value + std::log(2.0 * z) + I.params().log_c() - std::log(2.0 * I.q());
  auto phi = [&](double h) {
    const double lnl = log_neg_log_F(I.params(), h);
    const double neg_log_F = lnl == kNegInf ? 0.0 : std::exp(lnl);
    return head + z * log_one_minus_sq(h) + neg_log_F - std::log(h);
  };
  double lo = 1e-15;
  double hi = 1.0 - 1e-15;
  if (!(phi(lo) > 0.0)) return std::nullopt;  // g decreasing on (0,1)
  if (phi(hi) >= 0.0) return hi;  // mass within ulps of h = 1 (astronomical N)
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double p = phi(mid);
    if (std::fabs(p) <= 1e-10) return mid;
    (p > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      return 0.5 * (lo + hi);  // root resolved to machine precision
  }
  throw invariant_violation("find_mode: bisection did not converge");
}

// Curvature-based width of the peak, for seeding panels around the mode.
double mode_width(const Integrand& I, double h_star) {
  const double span = std::min(h_star, 1.0 - h_star);
  const double s = std::max(0.05 * span, 1e-15);
  const double g0 = I.g(h_star);
  const double gm = I.g(h_star - s);
  const double gp = I.g(h_star + s);
  if (gm == kNegInf || gp == kNegInf || g0 == kNegInf) return 0.25 * span;
  const double gpp = (gp - 2.0 * g0 + gm) / (s * s);
  if (!(gpp < 0.0)) return 0.25 * span;
  const double sigma = 1.0 / std::sqrt(-gpp);
  return std::min(std::max(sigma, 1e-15), 0.25 * span + s);
}

// Geometric ladder of breakpoints around the mode, out to where the
// integrand has fallen 60 e-folds below the peak (or the limits). The flanks
// decay like exp(-c u^z) and u^q rather than a Gaussian, so fixed multiples
// of sigma would leave the slow side of the peak buried inside one huge
// panel whose quadrature nodes all miss it.
std::vector<double> peak_ladder(const Integrand& I, double h_star, double sigma,
                                double lo, double hi) {
  const double g_star = I.g(h_star);
  std::vector<double> pts = {h_star};
  for (int side : {-1, 1}) {
    double step = sigma;
    for (int k = 0; k < 80; ++k, step *= 2.0) {
      const double h = h_star + side * step;
      if (h <= lo || h >= hi) break;
      pts.push_back(h);
      if (I.g(h) < g_star - 60.0 && k >= 2) break;
    }
  }
  return pts;
}

}  // namespace

const char* to_string(QuadMethod m) {
  return m == QuadMethod::direct ? "direct" : "laplace_window";
}

NormalizationConstants constants(const BetaModel& model, const SampleSize& size) {
  derive_count(model, size);  // validates n >= d+1 for both representations
  const double D = model.D();
  const double z = model.z();
  NormalizationConstants c;
  c.log_K_over_kappa = std::log(4.0 * D * z) +
                       log_binomial(size, static_cast<std::uint64_t>(model.d) + 1) +
                       (model.d + 1) * log_c(z);
  c.q = (model.d + 1) * (model.beta - 0.5) + 0.5 * model.d * (model.d + 3);
  return c;
}

double log_integrand(const BetaModel& model, const SampleSize& size, double h) {
  if (!(h > -1.0) || !(h < 1.0)) throw domain_error("log_integrand: |h| must be < 1");
  return Integrand(model, size).g(h);
}

std::optional<double> find_mode(const BetaModel& model, const SampleSize& size) {
  return find_mode_impl(Integrand(model, size));
}

double log_closed_form_simplex_ratio(const BetaModel& model) {
  const double D = model.D();
  const double z = model.z();
  const double a = 2.0 * D * z;  // = q + 1
  // Gamma(a)/Gamma(a+1/2) through the stable half-ratio.
  return std::log(4.0 * D * z) + (model.d + 1) * log_c(z) + 0.5 * kLogPi +
         log_gamma_half_ratio(a - 0.5);
}

double closed_form_simplex_ratio(const BetaModel& model) {
  return std::exp(log_closed_form_simplex_ratio(model));
}

VolumeResult expected_volume_ratio(const BetaModel& model, const SampleSize& size,
                                   double rel_tol) {
  if (!(rel_tol > 1e-12) || !(rel_tol < 1e-2))
    throw domain_error("expected_volume_ratio: rel_tol must lie in (1e-12, 1e-2)");

  const NormalizationConstants consts = constants(model, size);
  Integrand I(model, size);
  const double z = model.z();

  // When N is so large that the integrand's mass hugs h = 1 closer than the
  // double grid resolves (peak width ~ u*/(2 z sqrt(2D)) against an h-spacing
  // of one ulp), direct quadrature degrades. Monotonicity in n gives the
  // bracket [ratio(n'), 1] for any n' <= n; scan a short ladder of reduced
  // sizes for the tightest certified bracket.
  if (!I.count().is_zero) {
    const double peak_scale = z * std::sqrt(model.d + 1.0);
    const double log_u_star =
        (std::log(I.q()) - I.count().log_value - std::log(z) - I.params().log_c()) / z;
    if (log_u_star < std::log(1e-11 * peak_scale)) {
      double best_half_gap = 1.0, best_bar = 2.0;
      QuadratureReport best_report;
      for (int step = 0; step < 6; ++step) {
        const double target_log_u = std::log(3e-12 * peak_scale) + step * std::log(10.0);
        const double log_N_reduced = std::log(I.q()) - std::log(z) -
                                     I.params().log_c() - z * target_log_u;
        if (log_N_reduced >= I.count().log_value) break;
        const SampleSize reduced =
            SampleSize::from_log(log_add(log_N_reduced, std::log(model.d + 1.0)));
        double ratio_lo, err;
        QuadratureReport rep;
        try {
          const VolumeResult inner = expected_volume_ratio(model, reduced, rel_tol);
          ratio_lo = inner.ratio;
          err = inner.report.rel_error_estimate;
          rep = inner.report;
        } catch (const tolerance_error& e) {
          ratio_lo = std::min(1.0, std::exp(e.best_log_value()));
          err = e.rel_error();
        }
        const double half_gap = 0.5 * (1.0 - ratio_lo);
        const double bar = half_gap + err;
        if (bar < best_bar) {
          best_bar = bar;
          best_half_gap = half_gap;
          best_report = rep;
        }
        if (bar <= rel_tol) break;
      }
      if (best_bar > rel_tol)
        throw tolerance_error(
            "expected_volume_ratio: mass is unresolvably close to the ball boundary",
            std::log1p(-best_half_gap), best_bar);
      VolumeResult out;
      out.ratio = 1.0 - best_half_gap;
      out.log_ratio = std::log1p(-best_half_gap);
      out.report = best_report;
      out.report.rel_error_estimate = best_bar;
      return out;
    }
  }

  const std::optional<double> mode = find_mode_impl(I);
  auto g = std::function<double(double)>([&I](double h) { return I.g(h); });

  // Window seeds from the threshold parameterization; unavailable when the
  // recovered x leaves the window's domain.
  std::optional<std::pair<double, double>> seeds;
  if (mode) {
    try {
      double x_est = x_of(model.d, model.beta, size.log_n());
      x_est = std::min(std::max(x_est, 1e-6), 0.999 * 0.5 * model.d);
      if (x_est < model.D()) seeds = window(model.d, model.beta, x_est);
    } catch (const domain_error&) {
    }
  }

  bool concentrated = false;
  if (mode && seeds) {
    // Mass check: N c_z (1-a^2)^z > 10 means F^N already decays across the
    // window, i.e. the integrand is genuinely localized.
    const double mass =
        I.count().log_value + I.params().log_c() + z * log_one_minus_sq(seeds->first);
    concentrated = mass > std::log(10.0);
  }

  constexpr int kMaxNodes = 400000;
  int nodes = 0;
  std::vector<Panel> panels;
  QuadratureReport report;
  report.mode_h = mode;

  if (concentrated) {
    report.method = QuadMethod::laplace_window;
    const double h_star = *mode;
    const double sigma = mode_width(I, h_star);
    std::vector<double> ladder = peak_ladder(I, h_star, sigma, -1.0, 1.0);
    const auto [lmin, lmax] = std::minmax_element(ladder.begin(), ladder.end());
    double win_lo = std::max(-1.0, std::min(seeds->first, *lmin));
    double win_hi = std::min(1.0, std::max(seeds->second, *lmax));
    seed_panels(g, ladder, win_lo, win_hi, panels, nodes);
    refine(g, panels, 1e-2, kMaxNodes / 2, nodes);

    // Expand each side, doubling the distance from the mode, until the
    // analytic bound on the remaining tail is negligible against the mass
    // collected so far. Left of the window the integrand is at most F(lo)^N,
    // right of it at most (1-hi^2)^q.
    const double log_tail_share = std::log(rel_tol / 10.0);
    for (;;) {
      const double total = totals_of(panels).log_val;
      const double left_bound = std::log1p(win_lo) + I.n_log_F(win_lo);
      if (win_lo <= -1.0 || left_bound <= total + log_tail_share) break;
      const double new_lo = std::max(-1.0, win_lo - 2.0 * (h_star - win_lo));
      seed_panels(g, {0.5 * (new_lo + win_lo)}, new_lo, win_lo, panels, nodes);
      win_lo = new_lo;
    }
    for (;;) {
      const double total = totals_of(panels).log_val;
      const double right_bound = std::log1p(-win_hi) + I.q() * log_one_minus_sq(win_hi);
      if (win_hi >= 1.0 || right_bound <= total + log_tail_share) break;
      const double new_hi = std::min(1.0, win_hi + 2.0 * (win_hi - h_star));
      seed_panels(g, {0.5 * (win_hi + new_hi)}, win_hi, new_hi, panels, nodes);
      win_hi = new_hi;
    }
    report.window_lo = win_lo;
    report.window_hi = win_hi;
  } else {
    report.method = QuadMethod::direct;
    report.window_lo = -1.0;
    report.window_hi = 1.0;
    std::vector<double> pts = {-0.5, 0.0, 0.5};
    if (mode) {
      const double h_star = *mode;
      const double sigma = mode_width(I, h_star);
      const std::vector<double> ladder = peak_ladder(I, h_star, sigma, -1.0, 1.0);
      pts.insert(pts.end(), ladder.begin(), ladder.end());
      pts.push_back(-h_star);
      if (seeds) {
        pts.push_back(seeds->first);
        pts.push_back(seeds->second);
      }
    } else {
      // Peak at h = 0 of width ~ 1/sqrt(2q).
      const double s0 = 1.0 / std::sqrt(2.0 * I.q());
      for (double k : {1.0, 4.0, 16.0}) {
        pts.push_back(k * s0);
        pts.push_back(-k * s0);
      }
    }
    seed_panels(g, pts, -1.0, 1.0, panels, nodes);
  }

  const bool converged = refine(g, panels, rel_tol, kMaxNodes, nodes);
  const QuadTotals t = totals_of(panels);
  report.log_integral = t.log_val;
  report.nodes_used = nodes;
  report.rel_error_estimate =
      t.log_val == kNegInf ? 0.0 : std::exp(t.log_combined() - t.log_val);
  const double log_ratio = consts.log_K_over_kappa + t.log_val;

  if (!converged)
    throw tolerance_error("expected_volume_ratio: quadrature did not reach rel_tol",
                          log_ratio, report.rel_error_estimate);

  VolumeResult out;
  out.log_ratio = log_ratio;
  out.report = report;
  if (log_ratio > 0.0) {
    // Clamp within the certified accuracy of this evaluation; anything
    // farther above 1 is a genuine inconsistency, not roundoff.
    if (log_ratio > std::log1p(rel_tol + 3.0 * report.rel_error_estimate))
      throw invariant_violation(
          "expected_volume_ratio: ratio exceeds 1 beyond rel_tol (log ratio " +
          std::to_string(log_ratio) + ", error estimate " +
          std::to_string(report.rel_error_estimate) + ")");
    out.ratio = 1.0;
    out.log_ratio = 0.0;
  } else {
    out.ratio = std::exp(log_ratio);
  }
  return out;
}

}  // namespace betapoly
