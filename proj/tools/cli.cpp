#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "betapoly/asympt.hpp"
#include "betapoly/exactvol.hpp"
#include "betapoly/intrinsics.hpp"
#include "betapoly/mcgeom.hpp"

namespace betapoly::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 1729;  // documented CI default

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRegression = 3;
constexpr int kExitTolerance = 4;
constexpr int kExitInternal = 1;

// ---------------------------------------------------------------------------
// Flat records rendered as JSON lines or RFC-4180 CSV. Floats are printed
// with 17 significant digits so every value round-trips exactly.

struct Null {};
using Value = std::variant<Null, double, std::int64_t, std::uint64_t, std::string>;

struct Record {
  std::vector<std::pair<std::string, Value>> fields;

  Record& num(const std::string& k, double v) {
    if (std::isfinite(v))
      fields.emplace_back(k, v);
    else
      fields.emplace_back(k, Null{});
    return *this;
  }
  Record& integer(const std::string& k, std::int64_t v) {
    fields.emplace_back(k, v);
    return *this;
  }
  Record& uinteger(const std::string& k, std::uint64_t v) {
    fields.emplace_back(k, v);
    return *this;
  }
  Record& str(const std::string& k, const std::string& v) {
    fields.emplace_back(k, v);
    return *this;
  }
  Record& null(const std::string& k) {
    fields.emplace_back(k, Null{});
    return *this;
  }
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string value_json(const Value& v) {
  if (std::holds_alternative<Null>(v)) return "null";
  if (const double* d = std::get_if<double>(&v)) return format_double(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const std::uint64_t* u = std::get_if<std::uint64_t>(&v)) return std::to_string(*u);
  return "\"" + json_escape(std::get<std::string>(v)) + "\"";
}

std::string to_json_line(const Record& r) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : r.fields) {
    if (!first) out += ",";
    first = false;
    out += "\"" + json_escape(k) + "\":" + value_json(v);
  }
  out += "}";
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string value_csv(const Value& v) {
  if (std::holds_alternative<Null>(v)) return "";
  if (const double* d = std::get_if<double>(&v))
    return std::isfinite(*d) ? format_double(*d) : "";
  if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const std::uint64_t* u = std::get_if<std::uint64_t>(&v)) return std::to_string(*u);
  return csv_quote(std::get<std::string>(v));
}

std::string csv_header(const Record& r) {
  std::string out;
  for (std::size_t i = 0; i < r.fields.size(); ++i) {
    if (i) out += ",";
    out += csv_quote(r.fields[i].first);
  }
  return out;
}

std::string csv_row(const Record& r) {
  std::string out;
  for (std::size_t i = 0; i < r.fields.size(); ++i) {
    if (i) out += ",";
    out += value_csv(r.fields[i].second);
  }
  return out;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Shared flag bundles.

struct SizeFlags {
  std::optional<std::uint64_t> n;
  std::optional<double> log_n;
  std::optional<double> x;
};

void add_size_flags(CLI::App* cmd, SizeFlags& f) {
  cmd->add_option("--n", f.n, "exact number of points");
  cmd->add_option("--log-n", f.log_n, "natural log of the number of points");
  cmd->add_option("--x", f.x, "threshold parameter; log n = (d/2+beta) log(d/2x)");
}

struct ResolvedSize {
  SampleSize size;
  double log_n;
  double x;  // NaN when not derivable
};

ResolvedSize resolve_size(int d, double beta, const SizeFlags& f) {
  const int given = int(f.n.has_value()) + int(f.log_n.has_value()) + int(f.x.has_value());
  if (given != 1)
    throw domain_error("exactly one of --n, --log-n, --x must be given");
  if (f.n) {
    SampleSize s = SampleSize::exact(*f.n);
    const double ln = s.log_n();
    return {s, ln, ln > 0.0 ? x_of(d, beta, ln) : std::nan("")};
  }
  if (f.log_n) {
    SampleSize s = SampleSize::from_log(*f.log_n);
    return {s, *f.log_n, *f.log_n > 0.0 ? x_of(d, beta, *f.log_n) : std::nan("")};
  }
  const double ln = threshold_log_n(d, beta, *f.x);
  return {SampleSize::from_log(ln), ln, *f.x};
}

void add_report_fields(Record& rec, const VolumeResult& res) {
  rec.num("ratio", res.ratio)
      .num("log_ratio", res.log_ratio)
      .num("log_integral", res.report.log_integral);
  if (res.report.mode_h)
    rec.num("mode_h", *res.report.mode_h);
  else
    rec.null("mode_h");
  rec.num("window_lo", res.report.window_lo)
      .num("window_hi", res.report.window_hi)
      .integer("nodes_used", res.report.nodes_used)
      .num("rel_error_estimate", res.report.rel_error_estimate)
      .str("method", to_string(res.report.method));
}

double z_score(double estimate, double reference, double sigma) {
  const double diff = estimate - reference;
  if (sigma > 0.0) return diff / sigma;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Subcommand state.

struct ExactArgs {
  int d = 0;
  double beta = 0.0;
  SizeFlags size;
  double rel_tol = 1e-6;
  std::uint64_t seed = kDefaultSeed;
};

struct CurveArgs {
  std::vector<int> d_list;
  double beta = 0.0;
  std::vector<double> x_list;
  std::vector<double> log_n_list;
  double rel_tol = 1e-6;
  std::string format = "jsonl";
  int threads = 0;
  std::uint64_t seed = kDefaultSeed;
};

struct CompareArgs {
  int d = 0;
  double beta = 0.0;
  std::uint64_t n = 0;
  int trials = 10000;
  int probes = 1000;
  std::uint64_t seed = kDefaultSeed;
  double rel_tol = 1e-7;
  bool force = false;
  int threads = 0;
};

struct VerticesArgs {
  int d = 0;
  std::uint64_t n = 0;
  double beta = 0.0;
  int trials = 10000;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

struct WendelArgs {
  std::int64_t n = 0;
  int d = 0;
  double beta = 0.0;
  int trials = 20000;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

struct IntrinsicArgs {
  int d = 0;
  int k = 0;
  double beta = 0.0;
  SizeFlags size;
  double rel_tol = 1e-6;
  std::uint64_t seed = kDefaultSeed;
};

int run_exact(const ExactArgs& a, std::ostream& out) {
  Stopwatch sw;
  BetaModel model(a.d, a.beta);
  const ResolvedSize rs = resolve_size(a.d, a.beta, a.size);
  const VolumeResult res = expected_volume_ratio(model, rs.size, a.rel_tol);
  Record rec;
  rec.str("cmd", "exact").integer("d", a.d).num("beta", a.beta);
  if (rs.size.has_exact())
    rec.uinteger("n", rs.size.exact_n());
  else
    rec.null("n");
  rec.num("log_n", rs.log_n).num("x", rs.x).num("rel_tol", a.rel_tol)
      .uinteger("seed", a.seed);
  add_report_fields(rec, res);
  rec.num("wall_ms", sw.ms());
  out << to_json_line(rec) << "\n";
  return kExitOk;
}

int run_curve(const CurveArgs& a, std::ostream& out) {
  if (!a.x_list.empty() && !a.log_n_list.empty())
    throw domain_error("give either --x-list or --log-n-list, not both");
  if (a.x_list.empty() && a.log_n_list.empty())
    throw domain_error("one of --x-list or --log-n-list is required");
  const bool by_x = !a.x_list.empty();
  const std::vector<double>& values = by_x ? a.x_list : a.log_n_list;

  struct Row {
    Record rec;
    bool ok = false;
  };
  std::vector<std::pair<int, double>> jobs;
  for (int d : a.d_list)
    for (double v : values) jobs.emplace_back(d, v);
  std::vector<Row> rows(jobs.size());

  auto compute = [&](std::size_t i) {
    const auto [d, v] = jobs[i];
    Record& rec = rows[i].rec;
    rec.integer("d", d).num("beta", a.beta);
    try {
      const double log_n = by_x ? threshold_log_n(d, a.beta, v) : v;
      const double x = by_x ? v : x_of(d, a.beta, log_n);
      rec.num("log_n", log_n).num("x", x);
      const VolumeResult res =
          expected_volume_ratio(BetaModel(d, a.beta), SampleSize::from_log(log_n), a.rel_tol);
      rec.num("ratio_exact", res.ratio)
          .num("ratio_predicted", predicted_ratio(d, a.beta, log_n))
          .num("rel_error_estimate", res.report.rel_error_estimate)
          .null("error");
      rows[i].ok = true;
    } catch (const std::exception& e) {
      while (rec.fields.size() < 4) rec.null(rec.fields.size() == 2 ? "log_n" : "x");
      rec.null("ratio_exact").null("ratio_predicted").null("rel_error_estimate");
      rec.str("error", e.what());
    }
  };

  int workers = a.threads > 0 ? a.threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<int>(workers, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) compute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          compute(i);
        }
      });
    for (auto& t : pool) t.join();
  }

  const bool csv = a.format == "csv";
  bool any_ok = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (csv && i == 0) out << csv_header(rows[i].rec) << "\n";
    out << (csv ? csv_row(rows[i].rec) : to_json_line(rows[i].rec)) << "\n";
    any_ok = any_ok || rows[i].ok;
  }
  return any_ok ? kExitOk : kExitUsage;
}

int run_compare(const CompareArgs& a, std::ostream& out) {
  Stopwatch sw;
  if ((a.d > 12 || a.n > 500) && !a.force)
    throw domain_error(
        "compare refuses d > 12 or n > 500 (Monte Carlo cost); pass --force to override");
  BetaModel model(a.d, a.beta);
  const VolumeResult exact =
      expected_volume_ratio(model, SampleSize::exact(a.n), a.rel_tol);
  const Estimate mc = mc_volume_ratio(model, static_cast<int>(a.n), a.trials, a.probes,
                                      a.seed, a.threads);
  const double sigma = std::sqrt(mc.std_error * mc.std_error +
                                 std::pow(exact.ratio * exact.report.rel_error_estimate, 2));
  const double z = z_score(mc.value, exact.ratio, sigma);
  Record rec;
  rec.str("cmd", "compare")
      .integer("d", a.d)
      .num("beta", a.beta)
      .uinteger("n", a.n)
      .integer("trials", a.trials)
      .integer("probes", a.probes)
      .uinteger("seed", a.seed)
      .num("ratio_exact", exact.ratio)
      .num("mc_value", mc.value)
      .num("mc_std_error", mc.std_error)
      .num("z", z)
      .num("wall_ms", sw.ms());
  out << to_json_line(rec) << "\n";
  return std::fabs(z) > 4.0 ? kExitRegression : kExitOk;
}

int run_vertices(const VerticesArgs& a, std::ostream& out) {
  Stopwatch sw;
  if (a.beta != 0.0)
    throw domain_error("vertices requires beta = 0 (the vertex identity holds there)");
  BetaModel model(a.d, 0.0);
  if (a.n < static_cast<std::uint64_t>(a.d) + 1)
    throw domain_error("vertices: need n >= d+1");
  const Estimate mc =
      mc_vertex_count(model, static_cast<int>(a.n), a.trials, a.seed, a.threads);
  // Expected vertex count: n (1 - expected volume ratio with n-1 points);
  // n-1 = d points span no volume, so that case contributes ratio 0.
  double prev_ratio = 0.0;
  if (a.n - 1 >= static_cast<std::uint64_t>(a.d) + 1)
    prev_ratio =
        expected_volume_ratio(model, SampleSize::exact(a.n - 1), 1e-9).ratio;
  const double prediction = static_cast<double>(a.n) * (1.0 - prev_ratio);
  const double z = z_score(mc.value, prediction, mc.std_error);
  Record rec;
  rec.str("cmd", "vertices")
      .integer("d", a.d)
      .uinteger("n", a.n)
      .integer("trials", a.trials)
      .uinteger("seed", a.seed)
      .num("f0_estimate", mc.value)
      .num("f0_std_error", mc.std_error)
      .num("efron_prediction", prediction)
      .num("z", z)
      .num("wall_ms", sw.ms());
  out << to_json_line(rec) << "\n";
  return std::fabs(z) > 4.0 ? kExitRegression : kExitOk;
}

int run_wendel(const WendelArgs& a, std::ostream& out) {
  Stopwatch sw;
  BetaModel model(a.d, a.beta);
  const double bound = wendel_probability(a.n, a.d);
  const Estimate mc = mc_origin_containment(model, static_cast<int>(a.n), a.trials,
                                            a.seed, a.threads);
  // Beta models are centrally symmetric, so the bound is attained exactly.
  const double z = z_score(mc.value, bound, mc.std_error);
  Record rec;
  rec.str("cmd", "wendel")
      .integer("n", a.n)
      .integer("d", a.d)
      .num("beta", a.beta)
      .integer("trials", a.trials)
      .uinteger("seed", a.seed)
      .num("bound", bound)
      .num("identity_symmetric", bound)
      .num("mc_value", mc.value)
      .num("mc_std_error", mc.std_error)
      .num("z", z)
      .num("wall_ms", sw.ms());
  out << to_json_line(rec) << "\n";
  return std::fabs(z) > 4.0 ? kExitRegression : kExitOk;
}

int run_intrinsic(const IntrinsicArgs& a, std::ostream& out) {
  Stopwatch sw;
  const ResolvedSize rs = resolve_size(a.d, a.beta, a.size);
  const auto [d_red, beta_red] = reduce(a.d, a.k, a.beta);
  const VolumeResult res =
      expected_intrinsic_ratio(a.d, a.k, a.beta, rs.size, a.rel_tol);
  Record rec;
  rec.str("cmd", "intrinsic")
      .integer("d", a.d)
      .integer("k", a.k)
      .num("beta", a.beta)
      .integer("d_reduced", d_red)
      .num("beta_reduced", beta_red);
  if (rs.size.has_exact())
    rec.uinteger("n", rs.size.exact_n());
  else
    rec.null("n");
  rec.num("log_n", rs.log_n).num("x", rs.x).num("rel_tol", a.rel_tol)
      .uinteger("seed", a.seed);
  add_report_fields(rec, res);
  rec.num("wall_ms", sw.ms());
  out << to_json_line(rec) << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact and Monte Carlo expected volumes of beta random polytopes"};
  app.require_subcommand(1);

  ExactArgs ex;
  CLI::App* exact = app.add_subcommand("exact", "expected volume ratio by quadrature");
  exact->add_option("--d", ex.d, "ambient dimension (>= 2)")->required();
  exact->add_option("--beta", ex.beta, "beta parameter (>= -1)")->required();
  add_size_flags(exact, ex.size);
  exact->add_option("--rel-tol", ex.rel_tol, "quadrature relative tolerance");
  exact->add_option("--seed", ex.seed, "recorded in the output for provenance");

  CurveArgs cv;
  CLI::App* curve = app.add_subcommand("curve", "sweep the phase curve");
  curve->add_option("--d-list", cv.d_list, "dimensions to sweep")
      ->required()
      ->delimiter(',');
  curve->add_option("--beta", cv.beta, "beta parameter")->required();
  curve->add_option("--x-list", cv.x_list, "threshold parameters")->delimiter(',');
  curve->add_option("--log-n-list", cv.log_n_list, "log n values")->delimiter(',');
  curve->add_option("--rel-tol", cv.rel_tol, "quadrature relative tolerance");
  curve->add_option("--format", cv.format, "jsonl (default) or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  curve->add_option("--threads", cv.threads, "worker threads (0 = auto)");
  curve->add_option("--seed", cv.seed, "recorded for provenance");

  CompareArgs cp;
  CLI::App* compare =
      app.add_subcommand("compare", "exact ratio vs hit-or-miss Monte Carlo");
  compare->add_option("--d", cp.d)->required();
  compare->add_option("--beta", cp.beta)->required();
  compare->add_option("--n", cp.n, "number of points (exact)")->required();
  compare->add_option("--trials", cp.trials, "polytope draws");
  compare->add_option("--probes", cp.probes, "membership probes per draw");
  compare->add_option("--seed", cp.seed);
  compare->add_option("--rel-tol", cp.rel_tol);
  compare->add_flag("--force", cp.force, "override the d/n cost guard");
  compare->add_option("--threads", cp.threads, "worker threads (0 = auto)");

  VerticesArgs vx;
  CLI::App* vertices =
      app.add_subcommand("vertices", "vertex count vs the volume identity (beta = 0)");
  vertices->add_option("--d", vx.d)->required();
  vertices->add_option("--n", vx.n)->required();
  vertices->add_option("--beta", vx.beta, "must be 0; present for symmetry");
  vertices->add_option("--trials", vx.trials);
  vertices->add_option("--seed", vx.seed);
  vertices->add_option("--threads", vx.threads, "worker threads (0 = auto)");

  WendelArgs wd;
  CLI::App* wendel =
      app.add_subcommand("wendel", "origin-containment bound, identity and MC estimate");
  wendel->add_option("--n", wd.n)->required();
  wendel->add_option("--d", wd.d)->required();
  wendel->add_option("--beta", wd.beta, "beta model used for the MC estimate");
  wendel->add_option("--trials", wd.trials);
  wendel->add_option("--seed", wd.seed);
  wendel->add_option("--threads", wd.threads, "worker threads (0 = auto)");

  IntrinsicArgs in;
  CLI::App* intrinsic =
      app.add_subcommand("intrinsic", "intrinsic-volume ratio via dimension reduction");
  intrinsic->add_option("--d", in.d)->required();
  intrinsic->add_option("--k", in.k, "intrinsic volume index (1..d)")->required();
  intrinsic->add_option("--beta", in.beta)->required();
  add_size_flags(intrinsic, in.size);
  intrinsic->add_option("--rel-tol", in.rel_tol);
  intrinsic->add_option("--seed", in.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (exact->parsed()) return run_exact(ex, out);
    if (curve->parsed()) return run_curve(cv, out);
    if (compare->parsed()) return run_compare(cp, out);
    if (vertices->parsed()) return run_vertices(vx, out);
    if (wendel->parsed()) return run_wendel(wd, out);
    if (intrinsic->parsed()) return run_intrinsic(in, out);
  } catch (const domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tolerance_error& e) {
    err << "error: " << e.what() << " (best log estimate " << e.best_log_value()
        << ", error bound " << e.rel_error() << ")\n";
    return kExitTolerance;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace betapoly::cli
