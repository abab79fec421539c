// The operator calculus behind the product-normal Stein identity:
// T f(x) = x f'(x), the operator A_n f(x) = x^{-1} T^n f(x) (exact on
// polynomials, Stirling-expansion form for general functions), its
// right-inverse G_n f(x) = x E f(x V_n) with V_n a product of n independent
// standard uniforms, and the distributional characterization residual
// E[sigma^2 A_n f(Z) - Z f(Z)].
#pragma once

#include <functional>
#include <vector>

#include "pnstein/prodnormal.hpp"
#include "pnstein/rng.hpp"

namespace pnstein {

// Dense polynomial sum c_k x^k with trailing zeros normalized away.
struct Poly {
  std::vector<double> coeffs;

  Poly() = default;
  explicit Poly(std::vector<double> c);

  int degree() const;  // -1 for the zero polynomial
  double eval(double x) const;
  Poly deriv() const;
  bool operator==(const Poly&) const = default;
};

namespace operators {

// General function with caller-declared derivatives (no numeric
// differentiation happens inside A_n).
struct FnWithDerivs {
  std::function<double(double)> value;
  // derivs[i] is the (i+1)-th derivative
  std::vector<std::function<double(double)>> derivs;

  int order() const { return static_cast<int>(derivs.size()); }
  // Check declared derivatives against finite differences of `value`
  // on a probe grid, to 1e-5 relative.
  bool derivatives_consistent() const;
};

// T f(x) = x f'(x); maps x^k to k x^k.
Poly apply_T(const Poly& p);

// A_n f(x) = x^{-1} T^n f(x); maps x^k to k^n x^{k-1}.
Poly apply_An(const Poly& p, int n);

// Same operator through the Stirling expansion
// sum_{k=1}^n {n,k} x^{k-1} p^{(k)}(x); must agree exactly with apply_An.
Poly apply_An_stirling(const Poly& p, int n);

// Stirling form at a point for a general function.
double apply_An_numeric(const FnWithDerivs& f, int n, double x);

enum class GnMethod { nested_quadrature, monte_carlo };

// G_n h(x) = x E h(x V_n).  Nested-quadrature uses the iterated-integral
// form; MC averages over draws of V_n = exp(-Gamma(n,1)).
double apply_Gn(const std::function<double(double)>& h, int n, double x,
                GnMethod method, Rng* rng = nullptr, int mc_draws = 100000);

// Closed form on polynomials via E V_n^k = (k+1)^{-n}:
// G_n (sum c_k x^k) = x sum c_k x^k / (k+1)^n.
Poly apply_Gn_poly(const Poly& h, int n);

enum class ResidualMethod { exact_moments, monte_carlo };

// E[sigma^2 A_n f(Z) - Z f(Z)] for Z ~ PN(n, sigma^2).  Exact-moments path
// uses E Z^{2k} = sigma^{2k} ((2k-1)!!)^n and returns 0 to rounding; the MC
// path reports its standard error through *se_out when non-null.
double characterization_residual(const prodnormal::PNParams& params,
                                 const Poly& f, ResidualMethod method,
                                 Rng* rng = nullptr,
                                 std::int64_t mc_draws = 1000000,
                                 double* se_out = nullptr);

}  // namespace operators
}  // namespace pnstein
