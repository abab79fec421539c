// Modified Bessel functions I0, I1, K0, K1 with derivatives, repeated
// integrals of I0, the K0 tail integral, the integer lower incomplete gamma
// function, and Stirling numbers of the second kind.
//
// Everything here is pure and reentrant; no global mutable state.
#pragma once

#include <cstdint>

namespace pnstein::specfun {

// Whether a kernel is evaluated as-is or with the dominant exponential
// factor removed (e^{-x} for I-type kernels, e^{x} for K-type kernels).
// Wherever both are finite, natural = scaled * e^{+-x}.
enum class Scale { natural, exp_scaled };

// I_nu(x) for nu in {0,1}.  Power series for |x| <= 12, asymptotic
// expansion beyond.  Throws std::overflow_error if the natural value
// is not representable.
double bessel_i(int nu, double x, Scale scale = Scale::natural);

// K_nu(x) for nu in {0,1}, x > 0.  Log-series for x <= 2, Steed's
// continued fraction beyond.  Throws std::domain_error for x <= 0.
double bessel_k(int nu, double x, Scale scale = Scale::natural);

// k-th derivative of I0 / K0, k in 0..4, via the closed forms in terms of
// I0, I1 (resp. K0, K1).  For k >= 2 the forms carry 1/x^j terms; arguments
// with |x| < 1e-12 are rejected.
double i0_deriv(int k, double x, Scale scale = Scale::natural);
double k0_deriv(int k, double x, Scale scale = Scale::natural);

// m-fold repeated integral of I0 vanishing at 0:
//   I_(0,0,0) = I0,  I_(0,0,m)(x) = int_0^x I_(0,0,m-1).
// Computed by term-wise integration of the I0 power series.
double repeated_integral_i0(int m, double x, Scale scale = Scale::natural);

// int_x^inf K0(y) dy for x >= 0; equals pi/2 at x = 0.
double k0_tail_integral(double x, Scale scale = Scale::natural);

// gamma(n, x) = int_0^x t^{n-1} e^{-t} dt for integer n >= 1, x >= 0.
double lower_incomplete_gamma(int n, double x);

// Stirling number of the second kind {n, k}, exact in 64-bit integers.
// Valid through n = 25; larger n throws std::overflow_error.
std::int64_t stirling2(int n, int k);

// Singular-cancellation bracket kernels.  Each is the difference between an
// explicit 1/x^j singularity and the matching I-repeated-integral times
// K0-derivative product; the combination is bounded on (0, inf) even though
// both sides diverge at 0.  Evaluated in double-double arithmetic for
// small x.
double i1int_k0d2_gap(double x);  // 1/x   - I_(0,0,1)(x) K0''(x)
double i1int_k0d3_gap(double x);  // 2/x^2 + I_(0,0,1)(x) K0'''(x)
double i2int_k0d3_gap(double x);  // 1/x   + I_(0,0,2)(x) K0'''(x)
double i1int_k0d4_gap(double x);  // 6/x^3 + 1/x - I_(0,0,1)(x) K0''''(x)
double i2int_k0d4_gap(double x);  // 3/x^2 - I_(0,0,2)(x) K0''''(x)
double i3int_k0d4_gap(double x);  // 1/x   - I_(0,0,3)(x) K0''''(x)

}  // namespace pnstein::specfun
