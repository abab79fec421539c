#include "pnstein/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "pnstein/quad.hpp"
#include "pnstein/specfun.hpp"

namespace pnstein {

namespace {

void normalize(std::vector<double>& c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
}

}  // namespace

Poly::Poly(std::vector<double> c) : coeffs(std::move(c)) {
  normalize(coeffs);
  if (degree() > 64) throw std::invalid_argument("Poly: degree above 64");
}

int Poly::degree() const { return static_cast<int>(coeffs.size()) - 1; }

double Poly::eval(double x) const {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

Poly Poly::deriv() const {
  std::vector<double> d;
  for (std::size_t k = 1; k < coeffs.size(); ++k)
    d.push_back(static_cast<double>(k) * coeffs[k]);
  return Poly(std::move(d));
}

namespace operators {

bool FnWithDerivs::derivatives_consistent() const {
  // Order-4 central stencil of the previous level on a probe grid.
  static const double kGrid[] = {-2.1, -0.7, 0.3, 1.1, 2.4};
  const double h = 1e-2;
  for (int k = 1; k <= order(); ++k) {
    auto prev = (k == 1) ? value : derivs[k - 2];
    const auto& cur = derivs[k - 1];
    for (double x : kGrid) {
      const double fd = (8.0 * (prev(x + h) - prev(x - h)) -
                         (prev(x + 2 * h) - prev(x - 2 * h))) /
                        (12.0 * h);
      const double want = cur(x);
      if (std::abs(fd - want) > 1e-5 * std::max(1.0, std::abs(want)))
        return false;
    }
  }
  return true;
}

Poly apply_T(const Poly& p) {
  std::vector<double> c(p.coeffs);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= static_cast<double>(k);
  return Poly(std::move(c));
}

Poly apply_An(const Poly& p, int n) {
  if (n < 1) throw std::invalid_argument("apply_An: n must be >= 1");
  // x^k -> k^n x^{k-1}; the k=0 term is annihilated so division by x is exact.
  std::vector<double> c;
  for (std::size_t k = 1; k < p.coeffs.size(); ++k)
    c.push_back(std::pow(static_cast<double>(k), n) * p.coeffs[k]);
  return Poly(std::move(c));
}

Poly apply_An_stirling(const Poly& p, int n) {
  if (n < 1) throw std::invalid_argument("apply_An_stirling: n must be >= 1");
  // sum_{k=1}^n {n,k} x^{k-1} p^{(k)}(x)
  std::vector<double> acc;
  Poly d = p;
  for (int k = 1; k <= n; ++k) {
    d = d.deriv();
    const double s = static_cast<double>(specfun::stirling2(n, k));
    if (s == 0.0) continue;
    // add s * x^{k-1} * d
    for (std::size_t j = 0; j < d.coeffs.size(); ++j) {
      const std::size_t idx = j + static_cast<std::size_t>(k - 1);
      if (acc.size() <= idx) acc.resize(idx + 1, 0.0);
      acc[idx] += s * d.coeffs[j];
    }
  }
  return Poly(std::move(acc));
}

double apply_An_numeric(const FnWithDerivs& f, int n, double x) {
  if (n < 1) throw std::invalid_argument("apply_An_numeric: n must be >= 1");
  if (f.order() < n)
    throw std::invalid_argument("apply_An_numeric: needs derivatives to order n");
  double sum = 0.0;
  double xp = 1.0;  // x^{k-1}
  for (int k = 1; k <= n; ++k) {
    sum += static_cast<double>(specfun::stirling2(n, k)) * xp * f.derivs[k - 1](x);
    xp *= x;
  }
  return sum;
}

namespace {

// Iterated-integral form: g_1(t) = int_0^t h, g_j(t) = int_0^t g_{j-1}(s)/s ds,
// G_n h(x) = g_n(x).  The inner ratio is regular at 0 (g_{j-1}(s) ~ s h-ish).
double gn_nested(const std::function<double(double)>& h, int j, double t,
                 const quad::Options& opt) {
  if (t == 0.0) return 0.0;
  if (j == 1) return quad::integrate(h, 0.0, t, opt).value;
  auto inner = [&](double s) { return gn_nested(h, j - 1, s, opt) / s; };
  return quad::integrate(inner, 0.0, t, opt).value;
}

}  // namespace

double apply_Gn(const std::function<double(double)>& h, int n, double x,
                GnMethod method, Rng* rng, int mc_draws) {
  if (n < 1) throw std::invalid_argument("apply_Gn: n must be >= 1");
  if (method == GnMethod::nested_quadrature) {
    // Tolerance loosened with depth: the cost of nesting is multiplicative.
    quad::Options opt;
    opt.abs_tol = (n <= 2) ? 1e-11 : 1e-8;
    opt.rel_tol = (n <= 2) ? 1e-11 : 1e-8;
    opt.max_depth = (n <= 2) ? 30 : 12;
    return gn_nested(h, n, x, opt);
  }
  if (rng == nullptr)
    throw std::invalid_argument("apply_Gn: monte_carlo needs a generator");
  double s = 0.0;
  for (int i = 0; i < mc_draws; ++i) s += h(x * rng->uniform_product(n));
  return x * s / mc_draws;
}

Poly apply_Gn_poly(const Poly& h, int n) {
  if (n < 1) throw std::invalid_argument("apply_Gn_poly: n must be >= 1");
  std::vector<double> c(h.coeffs.size() + 1, 0.0);
  for (std::size_t k = 0; k < h.coeffs.size(); ++k)
    c[k + 1] = h.coeffs[k] / std::pow(static_cast<double>(k + 1), n);
  return Poly(std::move(c));
}

double characterization_residual(const prodnormal::PNParams& params,
                                 const Poly& f, ResidualMethod method,
                                 Rng* rng, std::int64_t mc_draws,
                                 double* se_out) {
  if (params.n < 1 || params.sigma <= 0.0)
    throw std::invalid_argument("characterization_residual: bad parameters");
  if (f.degree() > 8)
    throw std::invalid_argument("characterization_residual: deg f above 8");
  const double s2 = params.sigma * params.sigma;
  if (method == ResidualMethod::exact_moments) {
    // g = sigma^2 A_n f - x f; E g(Z) with E Z^{2k} = sigma^{2k} ((2k-1)!!)^n.
    Poly anf = apply_An(f, params.n);
    std::vector<double> g(f.coeffs.size() + 1, 0.0);
    for (std::size_t k = 0; k < anf.coeffs.size(); ++k) g[k] += s2 * anf.coeffs[k];
    for (std::size_t k = 0; k < f.coeffs.size(); ++k) g[k + 1] -= f.coeffs[k];
    double res = 0.0;
    for (std::size_t m = 0; m < g.size(); m += 2) {
      double dfact = 1.0;  // (m-1)!! for even m
      for (std::size_t j = 1; j < m; j += 2) dfact *= static_cast<double>(j);
      res += g[m] * std::pow(params.sigma, static_cast<double>(m)) *
             std::pow(dfact, params.n);
    }
    if (se_out) *se_out = 0.0;
    return res;
  }
  if (rng == nullptr)
    throw std::invalid_argument("characterization_residual: MC needs a generator");
  Poly anf = apply_An(f, params.n);
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < mc_draws; ++i) {
    double z = params.sigma;
    for (int j = 0; j < params.n; ++j) z *= rng->normal();
    const double v = s2 * anf.eval(z) - z * f.eval(z);
    const double d = v - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v - mean);
  }
  if (se_out)
    *se_out = std::sqrt(m2 / static_cast<double>(mc_draws - 1) /
                        static_cast<double>(mc_draws));
  return mean;
}

}  // namespace operators
}  // namespace pnstein
