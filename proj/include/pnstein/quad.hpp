// Adaptive Gauss-Kronrod (G7/K15) quadrature.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pnstein::quad {

struct Options {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  int max_depth = 30;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;

  Result& operator+=(const Result& o) {
    value += o.value;
    error += o.error;
    converged = converged && o.converged;
    return *this;
  }
};

namespace detail {

// G7/K15 nodes and weights (QUADPACK values).
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class F>
void gk15(const F& f, double a, double b, double& value, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double g7 = fc * kWg[3];
  double k15 = fc * kWgk[7];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double fsum = f(c - dx) + f(c + dx);
    k15 += fsum * kWgk[i];
    if (i % 2 == 1) g7 += fsum * kWg[i / 2];
  }
  value = k15 * h;
  error = std::abs(k15 - g7) * std::abs(h);
}

template <class F>
Result adapt(const F& f, double a, double b, const Options& opt, int depth) {
  double v, e;
  gk15(f, a, b, v, e);
  if (!std::isfinite(v) || !std::isfinite(e)) {
    Result r;
    r.value = v;
    r.error = std::abs(v);
    r.converged = false;
    return r;
  }
  if (e <= opt.abs_tol || e <= opt.rel_tol * std::abs(v) || depth >= opt.max_depth) {
    Result r;
    r.value = v;
    r.error = e;
    r.converged = (e <= opt.abs_tol || e <= opt.rel_tol * std::abs(v) ||
                   e <= 1e-14 * std::abs(v) + 1e-300);
    return r;
  }
  const double c = 0.5 * (a + b);
  Options half = opt;
  half.abs_tol = 0.5 * opt.abs_tol;
  Result r = adapt(f, a, c, half, depth + 1);
  r += adapt(f, c, b, half, depth + 1);
  return r;
}

}  // namespace detail

template <class F>
Result integrate(const F& f, double a, double b, const Options& opt = {}) {
  if (a == b) return {};
  return detail::adapt(f, a, b, opt, 0);
}

// Integrate over [pts.front(), pts.back()] with forced panel breaks at the
// interior points (singularities, kinks, decades of a log-singular factor).
template <class F>
Result integrate_segments(const F& f, std::span<const double> pts,
                          const Options& opt = {}) {
  Result total;
  if (pts.size() < 2) return total;
  Options per = opt;
  per.abs_tol = opt.abs_tol / static_cast<double>(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += integrate(f, pts[i], pts[i + 1], per);
  return total;
}

// Geometric refinement toward a log-type endpoint singularity at `a`.
template <class F>
Result integrate_log_singular(const F& f, double a, double b,
                              const Options& opt = {}) {
  std::vector<double> pts;
  double step = (b - a);
  pts.push_back(b);
  while (step > 1e-14 * (b - a) && pts.size() < 50) {
    step *= 0.125;
    pts.push_back(a + step);
  }
  pts.push_back(a);
  std::vector<double> fwd(pts.rbegin(), pts.rend());
  return integrate_segments(f, fwd, opt);
}

}  // namespace pnstein::quad
