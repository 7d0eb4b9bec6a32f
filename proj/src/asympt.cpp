#include "betapoly/asympt.hpp"

#include <cmath>
#include <string>

#include "betapoly/errors.hpp"
#include "betapoly/model.hpp"

namespace betapoly {

double threshold_log_n(int d, double beta, double x) {
  BetaModel model(d, beta);
  (void)model;
  if (!(x > 0.0)) throw domain_error("threshold_log_n: x must be > 0");
  if (!(2.0 * x < d))
    throw domain_error("threshold_log_n: requires 2x < d (got x=" + std::to_string(x) +
                       ", d=" + std::to_string(d) + ")");
  return (0.5 * d + beta) * std::log(d / (2.0 * x));
}

double x_of(int d, double beta, double log_n) {
  BetaModel model(d, beta);
  (void)model;
  if (!(log_n > 0.0)) throw domain_error("x_of: log n must be > 0");
  return 0.5 * d * std::exp(-2.0 * log_n / (d + 2.0 * beta));
}

double predicted_ratio(int d, double beta, double log_n) {
  if (!(log_n >= 0.0)) throw domain_error("predicted_ratio: log n must be >= 0");
  if (log_n == 0.0) return std::exp(-0.5 * d);
  return std::exp(-x_of(d, beta, log_n));
}

std::pair<double, double> window(int d, double beta, double x) {
  BetaModel model(d, beta);
  const double D = model.D();
  const double z = model.z();
  if (!(x > 0.0) || !(x < D))
    throw domain_error("window: requires 0 < x < D = (d+1)/2");
  const double rad_a = 1.0 - (x / D) * (1.0 + std::log(D * D * z) / z);
  if (!(rad_a > 0.0))
    throw domain_error("window: radicand of a is not positive (x=" + std::to_string(x) +
                       ", d=" + std::to_string(d) + ", beta=" + std::to_string(beta) + ")");
  const double a = std::sqrt(rad_a);
  const double b = std::sqrt(1.0 - x / D);
  return {a, b};
}

}  // namespace betapoly
