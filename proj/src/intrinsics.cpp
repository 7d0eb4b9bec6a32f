#include "betapoly/intrinsics.hpp"

#include <string>

#include "betapoly/logreal.hpp"

namespace betapoly {

double log_Vk_ball(int d, int k) {
  if (d < 1 || k < 0 || k > d)
    throw domain_error("log_Vk_ball: need 0 <= k <= d, got k=" + std::to_string(k) +
                       ", d=" + std::to_string(d));
  if (k == 0) return 0.0;  // V_0 = 1
  double log_binom = log_binomial(SampleSize::exact(static_cast<std::uint64_t>(d)),
                                  static_cast<std::uint64_t>(k));
  const double log_kappa_ratio = k == d ? log_kappa(d) : log_kappa(d) - log_kappa(d - k);
  return log_binom + log_kappa_ratio;
}

std::pair<int, double> reduce(int d, int k, double beta) {
  if (k < 1 || k > d) throw domain_error("reduce: need 1 <= k <= d");
  return {k, 0.5 * (d - k) + beta};
}

VolumeResult expected_intrinsic_ratio(int d, int k, double beta, const SampleSize& size,
                                      double rel_tol) {
  BetaModel full(d, beta);  // validates (d, beta) before reducing
  (void)full;
  const auto [d_red, beta_red] = reduce(d, k, beta);
  if (d_red < 2)
    throw domain_error("expected_intrinsic_ratio: reduced dimension k must be >= 2");
  if (!size.at_least(static_cast<std::uint64_t>(k) + 1))
    throw domain_error("expected_intrinsic_ratio: need n >= k+1");
  return expected_volume_ratio(BetaModel(d_red, beta_red), size, rel_tol);
}

}  // namespace betapoly
