#include <doctest.h>

#include <cmath>
#include <vector>

#include "betapoly/logreal.hpp"
#include "oracles.hpp"

using namespace betapoly;

TEST_SUITE_BEGIN("logreal");

TEST_CASE("log_add small exact values") {
  CHECK(log_add(std::log(1.0), std::log(1.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_add(std::log(3.0), std::log(4.0)) == doctest::Approx(std::log(7.0)).epsilon(1e-15));
  CHECK(log_add(kNegInf, 2.5) == 2.5);  // zero is the additive identity
  CHECK(log_add(2.5, kNegInf) == 2.5);
  CHECK(log_add(kNegInf, kNegInf) == kNegInf);
  // No overflow even when both operands sit near the top of the range.
  CHECK(log_add(700.0, 700.0) == doctest::Approx(700.0 + std::log(2.0)));
}

TEST_CASE("log_add associativity and commutativity") {
  std::vector<double> vals = {kNegInf, -745.0, -30.0, -1.0, 0.0, 0.5, 10.0, 300.0, 700.0};
  for (double a : vals)
    for (double b : vals) {
      CHECK(log_add(a, b) == log_add(b, a));
      for (double c : vals) {
        const double l = log_add(log_add(a, b), c);
        const double r = log_add(a, log_add(b, c));
        if (l == kNegInf)
          CHECK(r == kNegInf);
        else
          CHECK(l == doctest::Approx(r).epsilon(1e-14));
      }
    }
}

TEST_CASE("LogReal round trip and arithmetic") {
  CHECK(LogReal::from_value(0.0).is_zero());
  CHECK(LogReal::from_value(2.0).value() == doctest::Approx(2.0).epsilon(1e-15));
  const LogReal a = LogReal::from_value(3.0);
  const LogReal b = LogReal::from_value(4.0);
  CHECK((a + b).value() == doctest::Approx(7.0).epsilon(1e-14));
  CHECK((a * b).value() == doctest::Approx(12.0).epsilon(1e-14));
  CHECK((LogReal() + a).log_value() == a.log_value());
  CHECK_THROWS_AS(LogReal::from_value(-1.0), domain_error);
  CHECK_THROWS_AS(LogReal::from_log(std::numeric_limits<double>::infinity()),
                  invariant_violation);
}

TEST_CASE("log_gamma anchors") {
  CHECK(std::fabs(log_gamma(1.0)) <= 1e-14);
  CHECK(std::fabs(log_gamma(2.0)) <= 1e-14);
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-14));
  CHECK(log_gamma(10.0) == doctest::Approx(std::log(362880.0)).epsilon(1e-14));
  CHECK_THROWS_AS(log_gamma(0.0), domain_error);
  CHECK_THROWS_AS(log_gamma(-3.0), domain_error);
}

TEST_CASE("log_gamma vs exact factorials and half-integers") {
  // n! accumulated in long double: independent of the Lanczos path.
  long double fact = 1.0L;
  for (int n = 1; n <= 170; ++n) {
    fact *= n;
    const double expect = static_cast<double>(std::log(fact));
    CHECK(log_gamma(n + 1.0) == doctest::Approx(expect).epsilon(2e-14));
  }
  // Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
  long double num = 1.0L, den = 1.0L;
  for (int n = 1; n <= 80; ++n) {
    num *= (2.0L * n - 1.0L) * (2.0L * n);
    den *= 4.0L * n;
    const double expect =
        static_cast<double>(std::log(num / den) + 0.5L * std::log((long double)M_PI));
    CHECK(log_gamma(n + 0.5) == doctest::Approx(expect).epsilon(2e-14));
  }
}

TEST_CASE("log_gamma matches the libm implementation across the range") {
  // Relative accuracy of the log value, 1e-13, on a log grid in [1e-3, 1e7].
  for (double lz = std::log(1e-3); lz <= std::log(1e7); lz += 0.05) {
    const double z = std::exp(lz);
    const double ours = log_gamma(z);
    const double ref = std::lgamma(z);
    CHECK(std::fabs(ours - ref) <= 1e-13 * std::max(1.0, std::fabs(ref)));
  }
}

TEST_CASE("Gamma-ratio envelope, 1/sqrt(z+1/2) <= G(z+1/2)/G(z+1) <= 1/sqrt(z)") {
  for (double lz = std::log(1e-3); lz <= std::log(1e8); lz += 0.11) {
    const double z = std::exp(lz);
    const double ratio = std::exp(log_gamma_half_ratio(z));
    CHECK(ratio >= 1.0 / std::sqrt(z + 0.5) * (1.0 - 1e-13));
    CHECK(ratio <= 1.0 / std::sqrt(z) * (1.0 + 1e-13));
    // The raw log-Gamma difference agrees wherever its absolute error
    // (~|log Gamma| * eps) still resolves the envelope.
    if (z <= 1e6) {
      const double raw = std::exp(log_gamma(z + 0.5) - log_gamma(z + 1.0));
      CHECK(raw == doctest::Approx(ratio).epsilon(1e-9));
    }
  }
  // Branch crossover is seamless.
  for (double z : {9.99e4, 1.0001e5}) {
    const double raw = log_gamma(z + 0.5) - log_gamma(z + 1.0);
    CHECK(log_gamma_half_ratio(z) == doctest::Approx(raw).epsilon(1e-8));
  }
}

TEST_CASE("exponential inequality exp(-y^2/(m-y)) <= e^y (1-y/m)^m <= 1") {
  const std::vector<double> ms = {1.0, 2.0, 5.0, 37.0, 1e3, 1e6};
  for (double m : ms) {
    std::vector<double> ys = {-1e5, -100.0, -1.0, -1e-6, 1e-6, 0.5};
    for (double f : {0.1, 0.5, 0.9, 0.999}) ys.push_back(f * m);
    for (double y : ys) {
      if (!(y < m)) continue;
      // Everything in log domain: -y^2/(m-y) <= y + m log(1-y/m) <= 0.
      const double mid = y + m * std::log1p(-y / m);
      const double lo = -y * y / (m - y);
      const double slack = 1e-12 * std::max(1.0, std::fabs(lo));
      CHECK(mid >= lo - slack);
      CHECK(mid <= slack);
    }
  }
}

TEST_CASE("log_kappa low dimensions and recurrence") {
  CHECK(log_kappa(2) == doctest::Approx(std::log(M_PI)).epsilon(1e-15));
  CHECK(log_kappa(3) == doctest::Approx(std::log(4.0 * M_PI / 3.0)).epsilon(1e-15));
  // kappa_d = kappa_{d-2} * 2 pi / d gives an independent route to d = 100.
  double lk = std::log(M_PI);
  for (int d = 4; d <= 100; d += 2) {
    lk += std::log(2.0 * M_PI / d);
    CHECK(log_kappa(d) == doctest::Approx(lk).epsilon(1e-12));
  }
  CHECK(log_kappa(100) ==
        doctest::Approx(50.0 * std::log(M_PI) - log_gamma(51.0)).epsilon(1e-15));
}

TEST_CASE("log_c closed forms and large-z envelope") {
  CHECK(log_c(0.5) == doctest::Approx(std::log(1.0 / M_PI)).epsilon(1e-14));
  CHECK(log_c(1.0) == doctest::Approx(std::log(0.25)).epsilon(1e-14));
  const double z = 1e6;
  const double wendel_hi = -std::log(2.0) - 0.5 * std::log(M_PI * z);
  const double wendel_lo = -std::log(2.0) - 0.5 * std::log(M_PI * (z + 0.5));
  CHECK(log_c(z) <= wendel_hi + 1e-13);
  CHECK(log_c(z) >= wendel_lo - 1e-13);
}

TEST_CASE("log_binomial against the exact Pascal triangle") {
  const auto c = oracles::pascal(60);
  for (int n = 1; n <= 60; ++n) {
    const SampleSize s = SampleSize::exact(n);
    for (int k = 0; k <= n; ++k) {
      const double expect = std::log(static_cast<double>(c[n][k]));
      CHECK(log_binomial(s, k) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK(log_binomial(SampleSize::exact(5), 2) == doctest::Approx(std::log(10.0)));
  CHECK(log_binomial(SampleSize::exact(1000), 0) == 0.0);
  CHECK(log_binomial(SampleSize::from_log(200.0), 0) == 0.0);
  CHECK_THROWS_AS(log_binomial(SampleSize::exact(4), 6), domain_error);
}

TEST_CASE("log_binomial with log-only n: k log n - log k! within O(k^2/n)") {
  const std::uint64_t n = static_cast<std::uint64_t>(std::llround(std::exp(20.0)));
  const std::uint64_t k = 51;
  const double exact = log_binomial(SampleSize::exact(n), k);
  const double approx = log_binomial(SampleSize::from_log(std::log((double)n)), k);
  const double bound = static_cast<double>(k) * k / static_cast<double>(n);
  CHECK(approx >= exact);  // dropping the (1 - i/n) factors only increases it
  CHECK(approx - exact <= bound);
  // The astronomical case stays finite and matches the formula directly.
  const double big = log_binomial(SampleSize::from_log(200.0), 51);
  CHECK(big == doctest::Approx(51.0 * 200.0 - log_gamma(52.0)).epsilon(1e-15));
}

TEST_CASE("SampleSize derived counts and subtraction") {
  CHECK(SampleSize::exact(10).minus(4).exact_n() == 6);
  CHECK_THROWS_AS(SampleSize::exact(4).minus(4), domain_error);
  CHECK_THROWS_AS(SampleSize::exact(3).minus(7), domain_error);
  const SampleSize big = SampleSize::from_log(200.0);
  CHECK(big.minus(5).log_n() == doctest::Approx(200.0).epsilon(1e-15));
  const SampleSize small = SampleSize::from_log(std::log(100.0));
  CHECK(small.minus(40).log_n() == doctest::Approx(std::log(60.0)).epsilon(1e-12));
  CHECK(SampleSize::exact(7).at_least(7));
  CHECK_FALSE(SampleSize::exact(7).at_least(8));
  CHECK(big.at_least(1000000));
  CHECK_THROWS_AS(SampleSize::exact(0), domain_error);
}

TEST_SUITE_END();
