#include "pnstein/prodnormal.hpp"

#include <algorithm>
#include <initializer_list>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pnstein/quad.hpp"
#include "pnstein/specfun.hpp"

namespace pnstein::prodnormal {

namespace {

constexpr double kPi = std::numbers::pi;

double gauss_pdf(double u) {
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * kPi);
}

// Standardized densities q_n (sigma = 1), u > 0.
double q2(double u) { return specfun::bessel_k(0, u) / kPi; }

// Sorted breakpoints clipped to [lo, hi] for integrate_segments.
std::vector<double> panel_points(double lo, double hi,
                                 std::initializer_list<double> interior) {
  std::vector<double> pts{lo};
  for (double p : interior)
    if (p > lo && p < hi) pts.push_back(p);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  return pts;
}

// One normal factor peeled off: q_n(u) = 2 int_0^inf q_{n-1}(u/t) phi(t)/t dt.
double q3(double u, double tol) {
  // support: t above u/700 (else q2 underflows) and below ~9 (normal tail)
  const double lo = u / 700.0;
  if (lo >= 9.0) return 0.0;
  auto f = [u](double t) {
    const double v = u / t;
    if (v > 700.0) return 0.0;
    return q2(v) * gauss_pdf(t) / t;
  };
  quad::Options opt{1e-14, tol, 30};
  return 2.0 *
         quad::integrate_segments(f, panel_points(lo, 9.0, {lo + 0.5, 2.0}), opt)
             .value;
}

double q4_recursive(double u, double tol) {
  const double lo = u / 80.0;
  if (lo >= 9.0) return 0.0;
  auto f = [u, tol](double t) {
    const double v = u / t;
    if (v > 80.0) return 0.0;  // q3 there is ~1e-12 and falling
    return q3(v, std::max(tol, 1e-9)) * gauss_pdf(t) / t;
  };
  quad::Options opt{1e-13, std::max(tol, 1e-8), 20};
  return 2.0 *
         quad::integrate_segments(f, panel_points(lo, 9.0, {lo + 0.5, 2.0}), opt)
             .value;
}

// Fast n = 4 density as a product of two PN(2,1) factors:
// q4(u) = 2 int_0^inf q2(u/v) q2(v) / v dv.  Used by the integral-heavy
// operations (cdf, cf, expectation); agrees with the recursion.
double q4_fast(double u, double tol) {
  const double lo = u / 700.0;
  if (lo >= 700.0) return 0.0;
  auto f = [u](double v) {
    const double w = u / v;
    if (w > 700.0) return 0.0;
    return q2(w) * q2(v) / v;
  };
  quad::Options opt{1e-14, tol, 30};
  // sqrt(u) is the symmetry point of the convolution
  return 2.0 *
         quad::integrate_segments(
             f, panel_points(lo, 700.0, {std::sqrt(u), 2.0 * std::sqrt(u) + 1.0}),
             opt)
             .value;
}

double q_std(int n, double u, double tol, bool fast4) {
  switch (n) {
    case 1: return gauss_pdf(u);
    case 2: return q2(u);
    case 3: return q3(u, tol);
    default: return fast4 ? q4_fast(u, tol) : q4_recursive(u, tol);
  }
}

void check_params(const PNParams& params) {
  if (params.n < 1 || params.sigma <= 0.0)
    throw std::invalid_argument("PNParams: need n >= 1 and sigma > 0");
}

// Near-zero constant 2^{n-1} / ((2 pi)^{n/2} (n-1)!).
double near_zero_const(int n) {
  return std::pow(2.0, n - 1) /
         (std::pow(2.0 * kPi, 0.5 * n) * std::tgamma(static_cast<double>(n)));
}

// Mass of q_n on (0, a) by integrating the near-zero form analytically:
// int_0^a (-log u)^{n-1} du = (n-1)! - gamma(n, log(1/a)).
double core_mass(int n, double a) {
  if (n == 1) return a * gauss_pdf(0.0);
  return near_zero_const(n) * (std::tgamma(static_cast<double>(n)) -
                               specfun::lower_incomplete_gamma(n, std::log(1.0 / a)));
}

}  // namespace

double pdf(const PNParams& params, double x, const PdfEvalConfig& cfg) {
  check_params(params);
  if (params.n > cfg.max_order_quadrature && params.n > 2)
    throw std::invalid_argument("pdf: order above max_order_quadrature");
  const double u = std::abs(x) / params.sigma;
  if (params.n >= 2 && u < cfg.singularity_floor)
    throw std::domain_error("pdf: |x|/sigma below the singularity floor");
  return q_std(params.n, u, cfg.quad_tol, /*fast4=*/false) / params.sigma;
}

double pdf_asymptotic(const PNParams& params, double x, Regime regime) {
  check_params(params);
  const double u = std::abs(x) / params.sigma;
  const int n = params.n;
  if (regime == Regime::near_zero) {
    if (u >= 0.05) throw std::domain_error("pdf_asymptotic: not in near-zero regime");
    if (n == 1) return gauss_pdf(u) / params.sigma;
    return near_zero_const(n) * std::pow(-std::log(u), n - 1) / params.sigma;
  }
  if (u <= 3.0 * std::pow(static_cast<double>(n), 0.5 * n))
    throw std::domain_error("pdf_asymptotic: not in tail regime");
  return std::pow(2.0, 0.5 * n - 1.0) / (params.sigma * std::sqrt(kPi * n)) *
         std::pow(u, 1.0 / n - 1.0) * std::exp(-0.5 * n * std::pow(u, 2.0 / n));
}

double power_normal_pdf(int n, double sigma, double x) {
  if (n < 1 || sigma <= 0.0)
    throw std::invalid_argument("power_normal_pdf: need n >= 1, sigma > 0");
  const double u = std::abs(x) / sigma;
  if (u == 0.0) {
    if (n >= 2) throw std::domain_error("power_normal_pdf: singular at 0 for n >= 2");
    return 1.0 / (sigma * std::sqrt(2.0 * kPi));
  }
  return std::pow(u, 1.0 / n - 1.0) *
         std::exp(-0.5 * std::pow(u, 2.0 / n)) /
         (n * sigma * std::sqrt(2.0 * kPi));
}

double cdf(const PNParams& params, double x, const PdfEvalConfig& cfg) {
  check_params(params);
  if (params.n > cfg.max_order_quadrature && params.n > 2)
    throw std::invalid_argument("cdf: order above max_order_quadrature");
  if (x == 0.0) return 0.5;
  if (x < 0.0) return 1.0 - cdf(params, -x, cfg);
  const double u = x / params.sigma;
  const int n = params.n;
  if (n == 1) return 0.5 * std::erfc(-u / std::numbers::sqrt2);
  if (n == 2) {
    // int_0^u q2 = (pi/2 - int_u^inf K0) / pi
    return 1.0 - specfun::k0_tail_integral(u) / kPi;
  }
  const double a = 1e-10;  // analytic core below this
  double head = core_mass(n, std::min(a, u));
  if (u > a) {
    auto f = [&](double v) { return q_std(n, v, cfg.quad_tol, /*fast4=*/true); };
    quad::Options opt{1e-12, std::max(cfg.quad_tol, 1e-9), 24};
    head += quad::integrate_log_singular(f, a, std::min(u, 60.0), opt).value;
  }
  return std::min(0.5 + head, 1.0);
}

double sample_one(const PNParams& params, Rng& rng) {
  double z = params.sigma;
  for (int i = 0; i < params.n; ++i) z *= rng.normal();
  return z;
}

std::vector<double> sample(const PNParams& params, Rng& rng, std::int64_t count) {
  check_params(params);
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& v : out) v = sample_one(params, rng);
  return out;
}

double cf(const PNParams& params, double t) {
  check_params(params);
  const int n = params.n;
  if (n > 4) throw std::invalid_argument("cf: order above 4");
  const double s = params.sigma * std::abs(t);
  if (s == 0.0) return 1.0;
  switch (n) {
    case 1: return std::exp(-0.5 * s * s);
    case 2: return 1.0 / std::sqrt(1.0 + s * s);
    case 3: {
      const double y = 1.0 / (4.0 * s * s);
      // (2 pi s^2)^{-1/2} e^{y} K0(y), evaluated overflow-free
      return specfun::bessel_k(0, y, specfun::Scale::exp_scaled) /
             std::sqrt(2.0 * kPi * s * s);
    }
    default: {
      // cosine transform of the density, truncated where it falls below 1e-14
      // (q4 tail ~ e^{-2 sqrt u} => u ~ 280)
      const double kCut = 280.0;
      auto f = [s](double u) {
        if (u < 1e-8) return 0.0;  // integrable log^3 core, negligible width
        return std::cos(s * u) * q4_fast(u, 1e-8);
      };
      // geometric refinement into the log^3 origin spike, then a panel per
      // oscillation period to keep the adaptive splitting local
      std::vector<double> pts{0.0};
      for (double p = 1e-8; p < 0.5; p *= 8.0) pts.push_back(p);
      const double step = std::max(kPi / s, 0.6);
      for (double p = step; p < kCut; p += step) pts.push_back(p);
      pts.push_back(kCut);
      std::sort(pts.begin(), pts.end());
      quad::Options opt{1e-9, 1e-8, 20};
      return 2.0 * quad::integrate_segments(f, pts, opt).value;
    }
  }
}

double cf_ode_residual(const PNParams& params, double t) {
  check_params(params);
  if (params.n > 3) throw std::invalid_argument("cf_ode_residual: n must be <= 3");
  if (t == 0.0) throw std::invalid_argument("cf_ode_residual: t must be nonzero");
  const double s2 = params.sigma * params.sigma;
  auto phi = [&](double tt) { return cf(params, tt); };
  // order-8 central stencils; keep the stencil clear of t = 0
  const double h = std::min(0.02 * std::max(1.0, std::abs(t)), std::abs(t) / 9.0);
  static const double c1[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  double d1 = 0.0;
  for (int i = 1; i <= 4; ++i) d1 += c1[i - 1] * (phi(t + i * h) - phi(t - i * h));
  d1 /= h;
  const int n = params.n;
  if (n == 1) return s2 * t * phi(t) + d1;
  if (n == 2) return s2 * t * (t * d1 + phi(t)) + d1;
  static const double c2[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0,
                               -1.0 / 560.0};
  double d2 = c2[0] * phi(t);
  for (int i = 1; i <= 4; ++i) d2 += c2[i] * (phi(t + i * h) + phi(t - i * h));
  d2 /= h * h;
  // (t d/dt + 1)^2 phi = t^2 phi'' + 3 t phi' + phi
  return s2 * t * (t * t * d2 + 3.0 * t * d1 + phi(t)) + d1;
}

double expectation(const PNParams& params, const std::function<double(double)>& h,
                   Method method, const PdfEvalConfig& cfg, Rng* rng,
                   std::int64_t mc_draws, double* se_out) {
  check_params(params);
  if (method == Method::monte_carlo) {
    if (rng == nullptr)
      throw std::invalid_argument("expectation: monte_carlo needs a generator");
    double mean = 0.0, m2 = 0.0;
    for (std::int64_t i = 0; i < mc_draws; ++i) {
      const double v = h(sample_one(params, *rng));
      const double d = v - mean;
      mean += d / static_cast<double>(i + 1);
      m2 += d * (v - mean);
    }
    if (se_out)
      *se_out = std::sqrt(m2 / static_cast<double>(mc_draws - 1) /
                          static_cast<double>(mc_draws));
    return mean;
  }
  if (params.n > cfg.max_order_quadrature && params.n > 2)
    throw std::invalid_argument("expectation: order above max_order_quadrature");
  if (se_out) *se_out = 0.0;
  const int n = params.n;
  const double sig = params.sigma;
  if (n == 1) {
    auto f = [&](double u) { return h(sig * u) * gauss_pdf(u); };
    return quad::integrate(f, -9.0, 9.0,
                           {1e-13, std::max(cfg.quad_tol, 1e-11), 30})
        .value;
  }
  // split at the origin; the analytic core below a carries mass cm per side
  const double a = std::min(cfg.singularity_floor, 1e-10);
  const double cm = core_mass(n, a);
  double total = cm * (h(sig * a) + h(-sig * a));
  auto fp = [&](double u) { return h(sig * u) * q_std(n, u, cfg.quad_tol, true); };
  auto fm = [&](double u) { return h(-sig * u) * q_std(n, u, cfg.quad_tol, true); };
  quad::Options opt{1e-11, std::max(cfg.quad_tol, 1e-10), 24};
  // far enough out that even x^8-weighted integrands are exhausted
  const double hi = 700.0;
  total += quad::integrate_log_singular(fp, a, hi, opt).value;
  total += quad::integrate_log_singular(fm, a, hi, opt).value;
  return total;
}

}  // namespace pnstein::prodnormal
