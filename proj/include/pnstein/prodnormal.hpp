// The product-normal family PN(n, sigma^2): the law of sigma * N_1 ... N_n
// for independent standard normals.  Density, cdf, sampling, characteristic
// functions, and the expectation functional.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pnstein/rng.hpp"

namespace pnstein::prodnormal {

struct PNParams {
  int n = 1;        // number of normal factors
  double sigma = 1.0;  // product of the factor scales; only the product matters
};

struct PdfEvalConfig {
  double quad_tol = 1e-10;          // relative quadrature tolerance
  double singularity_floor = 1e-8;  // smallest |x|/sigma evaluated directly
  int max_order_quadrature = 4;     // largest n served by quadrature
};

enum class Regime { near_zero, tail };
enum class Method { quadrature, monte_carlo };

// Density.  n=1: Gaussian; n=2: K0(|x|/sigma)/(pi sigma); n in {3,4}:
// one-factor-at-a-time convolution recursion by adaptive quadrature.
// Throws std::domain_error for |x|/sigma below the singularity floor (n >= 2)
// and std::invalid_argument for n beyond max_order_quadrature.
double pdf(const PNParams& params, double x, const PdfEvalConfig& cfg = {});

// Leading asymptotic forms: near zero, (2 pi)^{-n/2} (-log(|x|/sigma))^{n-1}
// / ((n-1)! sigma); in the tail, the stretched-exponential decay formula.
double pdf_asymptotic(const PNParams& params, double x, Regime regime);

// Density of |X|^n sgn(X) for X ~ N(0, sigma^2).
double power_normal_pdf(int n, double sigma, double x);

// Distribution function by quadrature of the density, with the origin
// singularity handled analytically.  F(0) = 1/2 exactly.
double cdf(const PNParams& params, double x, const PdfEvalConfig& cfg = {});

// Draws of sigma * N_1 ... N_n; reproducible per generator state.
std::vector<double> sample(const PNParams& params, Rng& rng, std::int64_t count);
double sample_one(const PNParams& params, Rng& rng);

// Characteristic function (real-valued; the law is symmetric).  Closed form
// for n <= 3, numeric cosine transform of the density for n = 4.
double cf(const PNParams& params, double t);

// Residual of the characteristic-function ODE
// sigma^2 t (t d/dt + 1)^{n-1} phi_n(t) + phi_n'(t), derivatives by
// high-order finite differences of the closed forms.  n in {1,2,3}.
double cf_ode_residual(const PNParams& params, double t);

// E h(Z).  Quadrature splits at the origin and uses the near-zero asymptotic
// on the excluded core; MC uses the caller's generator.  For MC, *se_out
// (if non-null) receives the standard error.
double expectation(const PNParams& params, const std::function<double(double)>& h,
                   Method method, const PdfEvalConfig& cfg = {},
                   Rng* rng = nullptr, std::int64_t mc_draws = 1000000,
                   double* se_out = nullptr);

}  // namespace pnstein::prodnormal
