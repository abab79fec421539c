// Product-normal family against external high-precision references
// (Meijer-G evaluations), Monte Carlo oracles, and internal identities.
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pnstein/prodnormal.hpp"
#include "pnstein/quad.hpp"
#include "pnstein/specfun.hpp"

using namespace pnstein;
using namespace pnstein::prodnormal;

namespace {
double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
}  // namespace

TEST_CASE("pdf closed forms and references") {
  CHECK(pdf({1, 1.0}, 0.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(pdf({2, 1.0}, 1.0) ==
        doctest::Approx(specfun::bessel_k(0, 1.0) / std::numbers::pi)
            .epsilon(1e-13));
  CHECK(pdf({2, 1.0}, 1.0) == doctest::Approx(0.134018).epsilon(1e-5));

  struct Row { double x, v; };
  // Meijer-G references (mpmath, 30 digits)
  static const Row kQ3[] = {
      {1e-4, 11.339660714628225}, {0.01, 3.0569225252517977},
      {0.1, 0.9326485078990147},  {0.5, 0.22220668270259571},
      {1.0, 0.08652341948211546}, {3.0, 0.0089100087641506235},
      {10.0, 8.9856619369070463e-5}, {20.0, 9.6298867405672287e-7},
  };
  for (const auto& r : kQ3) CHECK(rel_err(pdf({3, 1.0}, r.x), r.v) < 1e-8);
  static const Row kQ4[] = {
      {1e-4, 29.964555662344433}, {0.01, 4.5878777848397126},
      {0.1, 0.93436450678179644}, {0.5, 0.16569793396988208},
      {1.0, 0.05939934765429388}, {3.0, 0.0066179356696515636},
      {10.0, 0.0001640522473460733}, {30.0, 7.2852926358386527e-7},
  };
  for (const auto& r : kQ4) CHECK(rel_err(pdf({4, 1.0}, r.x), r.v) < 1e-5);

  // symmetry and scaling: sigma p(x; n, sigma) = p(x/sigma; n, 1)
  for (int n = 1; n <= 4; ++n) {
    CHECK(pdf({n, 1.0}, 0.7) == pdf({n, 1.0}, -0.7));
    CHECK(rel_err(2.5 * pdf({n, 2.5}, 2.5 * 0.7), pdf({n, 1.0}, 0.7)) < 1e-9);
  }
  CHECK_THROWS_AS((void)pdf({2, 1.0}, 1e-12), std::domain_error);
  CHECK_THROWS_AS((void)pdf({5, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("pdf matches a Monte Carlo histogram for n = 3") {
  Rng rng(2024);
  const int kDraws = 2000000;
  const double kLo = 0.2, kHi = 2.2;
  const int kBins = 10;
  std::vector<int> counts(kBins, 0);
  for (int i = 0; i < kDraws; ++i) {
    const double z = sample_one({3, 1.0}, rng);
    if (z >= kLo && z < kHi)
      ++counts[static_cast<int>((z - kLo) / (kHi - kLo) * kBins)];
  }
  const double w = (kHi - kLo) / kBins;
  for (int b = 0; b < kBins; ++b) {
    const double p =
        cdf({3, 1.0}, kLo + (b + 1) * w) - cdf({3, 1.0}, kLo + b * w);
    const double se = std::sqrt(p * (1.0 - p) / kDraws);
    CHECK(std::abs(static_cast<double>(counts[b]) / kDraws - p) < 4.0 * se);
  }
}

TEST_CASE("pdf_asymptotic regimes") {
  // near zero
  CHECK(pdf({2, 1.0}, 1e-4) / pdf_asymptotic({2, 1.0}, 1e-4, Regime::near_zero) ==
        doctest::Approx(1.0).epsilon(0.1));
  CHECK(pdf({3, 1.0}, 1e-5) / pdf_asymptotic({3, 1.0}, 1e-5, Regime::near_zero) ==
        doctest::Approx(1.0).epsilon(0.15));
  // n = 1 tail formula is exactly Gaussian
  for (double x : {3.5, 5.0, 8.0})
    CHECK(rel_err(pdf_asymptotic({1, 1.0}, x, Regime::tail), pdf({1, 1.0}, x)) <
          1e-14);
  // n = 2 far tail
  CHECK(pdf({2, 1.0}, 25.0) / pdf_asymptotic({2, 1.0}, 25.0, Regime::tail) ==
        doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS((void)pdf_asymptotic({2, 1.0}, 1.0, Regime::near_zero),
                  std::domain_error);
  CHECK_THROWS_AS((void)pdf_asymptotic({2, 1.0}, 1.0, Regime::tail),
                  std::domain_error);
}

TEST_CASE("power_normal_pdf") {
  // n = 1 is the N(0, sigma^2) density
  for (double x : {0.0, 1.0})
    CHECK(rel_err(power_normal_pdf(1, 1.0, x), pdf({1, 1.0}, x)) < 1e-14);
  // normalizes to 1; substitute x = v^n to tame the x^{1/n-1} origin spike
  for (int n : {2, 3}) {
    auto f = [n](double v) {
      return power_normal_pdf(n, 1.0, std::pow(v, n)) * n *
             std::pow(v, n - 1);
    };
    const double mass =
        2.0 * quad::integrate(f, 1e-14, 9.0, {1e-13, 1e-12, 30}).value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  }
  // heavier origin singularity than the product law
  double prev = 0.0;
  for (double x : {1e-2, 1e-4, 1e-6}) {
    const double ratio = power_normal_pdf(2, 1.0, x) / pdf({2, 1.0}, x);
    CHECK(ratio > prev);
    prev = ratio;
  }
  CHECK_THROWS_AS((void)power_normal_pdf(2, 1.0, 0.0), std::domain_error);
}

TEST_CASE("cdf") {
  for (int n = 1; n <= 4; ++n) CHECK(cdf({n, 1.3}, 0.0) == 0.5);
  CHECK(cdf({1, 1.0}, 1.96) == doctest::Approx(0.975).epsilon(2e-4));
  // n = 2 against direct quadrature of the density
  for (double x : {0.3, 1.0, 2.5}) {
    PdfEvalConfig cfg;
    cfg.singularity_floor = 1e-12;
    const double direct =
        0.5 + quad::integrate_log_singular(
                  [cfg](double y) { return pdf({2, 1.0}, y, cfg); }, 1e-9, x)
                  .value;
    CHECK(rel_err(cdf({2, 1.0}, x), direct) < 1e-8);
  }
  struct Row { int n; double x, v; };
  static const Row kRows[] = {
      {3, 0.25, 0.77787560578883}, {3, 1.0, 0.92669192245645},
      {3, 3.0, 0.988431917414827}, {4, 0.25, 0.834714998674871},
      {4, 1.0, 0.947034839476587}, {4, 3.0, 0.98947969825245},
  };
  for (const auto& r : kRows) CHECK(rel_err(cdf({r.n, 1.0}, r.x), r.v) < 1e-6);
  // reflection and monotonicity
  for (double x : {0.4, 1.7})
    CHECK(cdf({3, 1.0}, -x) == doctest::Approx(1.0 - cdf({3, 1.0}, x)).epsilon(1e-12));
  double last = 0.0;
  for (double x = -3.0; x <= 3.0; x += 0.5) {
    const double v = cdf({4, 2.0}, x);
    CHECK(v >= last);
    last = v;
  }
}

TEST_CASE("empirical cdf agrees with cdf for n = 2 (KS)") {
  Rng rng(31337);
  const int kN = 200000;
  std::vector<double> z(kN);
  for (auto& v : z) v = sample_one({2, 1.0}, rng);
  std::sort(z.begin(), z.end());
  double d = 0.0;
  for (int i = 0; i < kN; i += 37) {  // subsample the sup for speed
    const double f = cdf({2, 1.0}, z[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / kN));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / kN - f));
  }
  CHECK(d < 1.6276 / std::sqrt(static_cast<double>(kN)));  // 1% critical value
}

TEST_CASE("sampling moments") {
  Rng rng(555);
  const int kN = 1000000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < kN; ++i) {
    const double z = sample_one({2, 1.5}, rng);
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  s1 /= kN; s2 /= kN; s4 /= kN;
  const double sig2 = 1.5 * 1.5;
  // var Z = sigma^2, var Z^2 = sigma^4 (9 - 1), generous 4 SE margins
  CHECK(std::abs(s1) < 4.0 * std::sqrt(sig2 / kN));
  CHECK(std::abs(s2 - sig2) < 4.0 * std::sqrt(8.0 * sig2 * sig2 / kN));
  CHECK(std::abs(s4 / (sig2 * sig2) - 9.0) < 4.0 * std::sqrt(945.0 / kN) * 3.0);
}

TEST_CASE("characteristic functions") {
  CHECK(cf({2, 1.0}, 1.0) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-14));
  for (int n = 1; n <= 4; ++n) CHECK(cf({n, 1.0}, 0.0) == 1.0);
  struct Row { double t, v; };
  static const Row kCf3[] = {
      {0.3, 0.961828744321408}, {1.0, 0.789639959235657}, {2.0, 0.614143155169911}};
  for (const auto& r : kCf3) CHECK(rel_err(cf({3, 1.0}, r.t), r.v) < 1e-12);
  static const Row kCf4[] = {{0.5, 0.931979836315},
                             {1.0, 0.846912498123},
                             {2.0, 0.721365593482},
                             {5.0, 0.526043605772}};
  for (const auto& r : kCf4) CHECK(rel_err(cf({4, 1.0}, r.t), r.v) < 1e-5);
  // scale law and bounds
  for (int n = 1; n <= 4; ++n) {
    CHECK(rel_err(cf({n, 2.0}, 0.7), cf({n, 1.0}, 1.4)) < 1e-9);
    CHECK(std::abs(cf({n, 1.0}, 3.3)) <= 1.0);
  }
  // MC oracle for n = 3: average of cos(tZ)
  Rng rng(808);
  for (double t : {0.5, 1.0, 2.0}) {
    const int kN = 400000;
    double m = 0.0;
    for (int i = 0; i < kN; ++i) m += std::cos(t * sample_one({3, 1.0}, rng));
    m /= kN;
    CHECK(std::abs(m - cf({3, 1.0}, t)) < 4.0 / std::sqrt(static_cast<double>(kN)));
  }
  CHECK_THROWS_AS((void)cf({5, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("cf ODE residual") {
  CHECK(std::abs(cf_ode_residual({1, 1.0}, 1.0)) < 1e-8);
  for (double t : {0.5, 2.0}) CHECK(std::abs(cf_ode_residual({2, 1.0}, t)) < 1e-6);
  CHECK(std::abs(cf_ode_residual({3, 1.0}, 1.0)) < 1e-5);
  for (double t = 0.1; t <= 10.0; t *= 2.1)
    for (int n : {1, 2, 3})
      CHECK(std::abs(cf_ode_residual({n, 0.8}, t)) < 1e-6);
  CHECK_THROWS_AS((void)cf_ode_residual({2, 1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("expectation functional") {
  auto one = [](double) { return 1.0; };
  for (int n = 1; n <= 4; ++n)
    CHECK(expectation({n, 1.0}, one, Method::quadrature) ==
          doctest::Approx(1.0).epsilon(1e-7));
  auto sq = [](double x) { return x * x; };
  for (int n = 1; n <= 4; ++n)
    for (double sig : {0.7, 1.0, 2.0})
      CHECK(expectation({n, sig}, sq, Method::quadrature) ==
            doctest::Approx(sig * sig).epsilon(1e-5));
  // moment ladder k = 2: E Z^4 = sigma^4 3^n
  auto p4 = [](double x) { return x * x * x * x; };
  for (int n = 1; n <= 4; ++n)
    CHECK(expectation({n, 1.0}, p4, Method::quadrature) ==
          doctest::Approx(std::pow(3.0, n)).epsilon(1e-4));
  // E cos(Z) = Re phi(1)
  auto cosf = [](double x) { return std::cos(x); };
  CHECK(expectation({2, 1.0}, cosf, Method::quadrature) ==
        doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-8));
  // MC agreement
  Rng rng(9090);
  double se = 0.0;
  const double mc = expectation({3, 1.0}, cosf, Method::monte_carlo, {}, &rng,
                                500000, &se);
  CHECK(se > 0.0);
  CHECK(std::abs(mc - expectation({3, 1.0}, cosf, Method::quadrature)) < 4.0 * se);
}

TEST_CASE("cosine transform of pdf reproduces cf") {
  for (int n : {2, 3}) {
    for (double t : {0.0, 1.0, 3.0, 5.0}) {
      PdfEvalConfig cfg;
      cfg.singularity_floor = 1e-12;
      auto f = [&](double x) {
        return std::cos(t * x) * pdf({n, 1.0}, x, cfg);
      };
      const double got =
          2.0 *
          quad::integrate_log_singular(f, 1e-9, 60.0, {1e-9, 1e-8, 20}).value;
      CHECK(std::abs(got - cf({n, 1.0}, t)) < 1e-4);
    }
  }
}
