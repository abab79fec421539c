#include "pnstein/stein2.hpp"

#include <cmath>
#include <stdexcept>

#include "pnstein/quad.hpp"
#include "pnstein/specfun.hpp"

namespace pnstein::stein2 {

namespace sf = pnstein::specfun;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kScaledCutoff = 30.0;  // natural kernel products below, scaled above
constexpr double kOriginClamp = 1e-7;

// Centred test function and its derivatives, possibly reflected (t(y) = g(-y))
// so that all kernel evaluation happens at nonnegative arguments.
struct Kernel {
  const testfn::TestFn* h;
  double sigma;
  double pn2h;
  bool reflected;

  double sgn() const { return reflected ? -1.0 : 1.0; }
  double t(double y) const { return h->h(sgn() * sigma * y) - pn2h; }
  double t1(double y) const { return sgn() * sigma * h->d1(sgn() * sigma * y); }
  double t2(double y) const {
    return sigma * sigma * h->d2(sgn() * sigma * y);
  }
  double t3(double y) const {
    const double s3 = sigma * sigma * sigma;
    return sgn() * s3 * h->d3(sgn() * sigma * y);
  }
  double dk(int j, double y) const {
    switch (j) {
      case 0: return t(y);
      case 1: return t1(y);
      case 2: return t2(y);
      default: return t3(y);
    }
  }
};

const quad::Options kOpt{1e-13, 1e-10, 30};

// K0^{(k)}(u) * int_0^u w_j(y) J_j(y) dy with w_j the j-th kernel derivative
// and J_j the j-fold repeated integral of I0 (J_0 = I0 itself).  Scaled
// evaluation for large u: the e^u growth of J_j is cancelled against K0^{(k)}.
double k0d_times_aint(const Kernel& ker, int k, int j, double u) {
  if (u <= 0.0) return 0.0;
  if (u <= kScaledCutoff) {
    auto f = [&](double y) {
      return ker.dk(j, y) * sf::repeated_integral_i0(j, y);
    };
    const double a = quad::integrate(f, 0.0, u, kOpt).value;
    return sf::k0_deriv(k, u) * a;
  }
  auto f = [&](double y) {
    return ker.dk(j, y) * sf::repeated_integral_i0(j, y, sf::Scale::exp_scaled) *
           std::exp(y - u);
  };
  const double lo = u - 40.0;  // e^{y-u} < 4e-18 below; negligible
  const double a = quad::integrate(f, lo, u, kOpt).value;
  return sf::k0_deriv(k, u, sf::Scale::exp_scaled) * a;
}

// I0^{(k)}(u) * int_u^infty K0(y) t(y) dy, truncated at u + 60 (the omitted
// tail is below e^{-60} ||t||).  Scaled for large u.
double i0d_times_btail(const Kernel& ker, int k, double u) {
  if (u <= kScaledCutoff) {
    auto f = [&](double y) { return sf::bessel_k(0, y) * ker.t(y); };
    // geometric refinement toward u soaks up the K0 log factor when u is small
    const double b = quad::integrate_log_singular(f, u, u + 60.0, kOpt).value;
    return sf::i0_deriv(k, u) * b;
  }
  auto f = [&](double y) {
    return sf::bessel_k(0, y, sf::Scale::exp_scaled) * std::exp(u - y) * ker.t(y);
  };
  const double b = quad::integrate(f, u, u + 60.0, kOpt).value;
  return sf::i0_deriv(k, u, sf::Scale::exp_scaled) * b;
}

// K1(u) J_1(u), bounded on (0, inf) with limit 1 at 0.
double k1_j1(double u) {
  if (u <= 0.0) return 1.0;
  if (u <= kScaledCutoff)
    return sf::bessel_k(1, u) * sf::repeated_integral_i0(1, u);
  return sf::bessel_k(1, u, sf::Scale::exp_scaled) *
         sf::repeated_integral_i0(1, u, sf::Scale::exp_scaled);
}

// psi^{(k)} for k = 0..kmax at u >= 0, sharing the tail integral across
// orders.  Regrouped forms: each explicit 1/u^j singularity is paired with
// its compensating repeated-integral product (the gap kernels), so every
// term is bounded near the origin.
void eval_derivs(const Kernel& ker, double u, int kmax, double* out) {
  const double uc = (kmax >= 1 && u < kOriginClamp) ? kOriginClamp : u;
  for (int k = 0; k <= kmax; ++k) {
    switch (k) {
      case 0:
        out[0] = -k0d_times_aint(ker, 0, 0, u) - i0d_times_btail(ker, 0, u);
        break;
      case 1:
        // psi' = t K1 J1 + K0' int t' J1 - I0' B  (K0' = -K1 inside the helper)
        out[1] = ker.t(uc) * k1_j1(uc) + k0d_times_aint(ker, 1, 1, uc) -
                 i0d_times_btail(ker, 1, uc);
        break;
      case 2:
        out[2] = ker.t(uc) * sf::i1int_k0d2_gap(uc) +
                 k0d_times_aint(ker, 2, 1, uc) - i0d_times_btail(ker, 2, uc);
        break;
      case 3:
        out[3] = -ker.t(uc) * sf::i1int_k0d3_gap(uc) +
                 ker.t1(uc) * sf::i2int_k0d3_gap(uc) -
                 k0d_times_aint(ker, 3, 2, uc) - i0d_times_btail(ker, 3, uc);
        break;
      case 4:
        out[4] = ker.t(uc) * sf::i1int_k0d4_gap(uc) -
                 ker.t1(uc) * sf::i2int_k0d4_gap(uc) +
                 ker.t2(uc) * sf::i3int_k0d4_gap(uc) +
                 k0d_times_aint(ker, 4, 3, uc) - i0d_times_btail(ker, 4, uc);
        break;
    }
  }
}

// f^{(k)}(x) for k = 0..kmax for the sigma-scaled problem; reflection for
// x < 0 flips the kernel and the odd-order signs.
void solution_derivs(const testfn::TestFn& h, double sigma, double pn2h,
                     double x, int kmax, double* out) {
  Kernel ker{&h, sigma, pn2h, x < 0.0};
  const double u = std::abs(x) / sigma;
  double psi[5];
  eval_derivs(ker, u, kmax, psi);
  double pw = 1.0 / sigma;
  for (int k = 0; k <= kmax; ++k) {
    const double sign = (x < 0.0 && k % 2 == 0) ? -1.0 : 1.0;
    out[k] = sign * psi[k] * pw;
    pw /= sigma;
  }
}

}  // namespace

SteinSol2::SteinSol2(const testfn::TestFn& h, double sigma) : h_(h), sigma_(sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("SteinSol2: sigma must be positive");
  pn2h_ = testfn::pn2_mean(h, sigma);
  hnorm_ = testfn::centered_norm(h, pn2h_);
}

double SteinSol2::htilde(double x) const { return h_.h(x) - pn2h_; }

double SteinSol2::value(double x) const {
  double out[5];
  solution_derivs(h_, sigma_, pn2h_, x, 0, out);
  return out[0];
}

double SteinSol2::deriv(int k, double x) const {
  if (k < 1 || k > 4) throw std::invalid_argument("SteinSol2::deriv: k in 1..4");
  double out[5];
  solution_derivs(h_, sigma_, pn2h_, x, k, out);
  return out[k];
}

double SteinSol2::residual(double x) const {
  double out[5];
  solution_derivs(h_, sigma_, pn2h_, x, 2, out);
  const double s2 = sigma_ * sigma_;
  return s2 * x * out[2] + s2 * out[1] - x * out[0] - htilde(x);
}

std::vector<double> default_grid(double sigma, int points_per_side) {
  std::vector<double> g;
  g.push_back(0.0);
  const double lo = 1e-4 * sigma, hi = 50.0 * sigma;
  const double r = std::log(hi / lo) / (points_per_side - 1);
  for (int i = 0; i < points_per_side; ++i) {
    const double x = lo * std::exp(r * i);
    g.push_back(x);
    g.push_back(-x);
  }
  return g;
}

BoundReport verify_thm_bounds(const testfn::TestFn& h, double sigma,
                              const std::vector<double>& grid) {
  SteinSol2 sol(h, sigma);
  const double ht = sol.htilde_norm();
  const double s = sigma;
  double sup[5] = {0, 0, 0, 0, 0};
  double supx[3] = {0, 0, 0};
  double at[5] = {0, 0, 0, 0, 0};
  double atx[3] = {0, 0, 0};
  for (double x : grid) {
    double d[5];
    solution_derivs(h, sigma, sol.pn2h(), x, 4, d);
    for (int k = 0; k <= 4; ++k)
      if (std::abs(d[k]) > sup[k]) { sup[k] = std::abs(d[k]); at[k] = x; }
    for (int k = 0; k <= 2; ++k)
      if (std::abs(x * d[k]) > supx[k]) { supx[k] = std::abs(x * d[k]); atx[k] = x; }
  }
  BoundReport rep;
  rep.grid_estimated_norms = h.grid_estimated;
  auto add = [&](const std::string& id, double lhs, double rhs, double wx) {
    BoundLine l{id, lhs, rhs, rhs - lhs, wx, lhs <= rhs * (1.0 + 1e-12)};
    rep.all_hold = rep.all_hold && l.holds;
    rep.lines.push_back(l);
  };
  add("sup_f", sup[0], 3.0 / s * ht, at[0]);
  add("sup_f1", sup[1], 1.5 / (s * s) * ht, at[1]);
  add("sup_f2", sup[2], 2.0 * h.norm_d1 / (s * s) + 5.0 / (s * s * s) * ht, at[2]);
  add("sup_f3", sup[3],
      4.0 * h.norm_d2 / (s * s) + 5.0 * h.norm_d1 / std::pow(s, 3) +
          4.89 / std::pow(s, 4) * ht,
      at[3]);
  add("sup_f4", sup[4],
      8.0 * h.norm_d3 / (s * s) + 9.0 * h.norm_d2 / std::pow(s, 3) +
          6.81 * h.norm_d1 / std::pow(s, 4) + 15.75 / std::pow(s, 5) * ht,
      at[4]);
  // x-weighted norms: scaling x -> x/sigma shows sup |x f^{(k)}(x)| equals
  // the unit-scale supremum divided by sigma^k (no extra 1/sigma).
  add("sup_xf", supx[0], 2.0 * ht, atx[0]);
  add("sup_xf1", supx[1], 1.5 / s * ht, atx[1]);
  add("sup_xf2", supx[2], 4.5 / (s * s) * ht, atx[2]);
  return rep;
}

BoundReport verify_arflem(const testfn::TestFn& h, double sigma,
                          const std::vector<double>& grid) {
  SteinSol2 sol(h, sigma);
  const double ht = sol.htilde_norm();
  double sup[2] = {0, 0};
  double at[2] = {0, 0};
  for (double x : grid) {
    double d[5];
    solution_derivs(h, sigma, sol.pn2h(), x, 2, d);
    // sigma^2 (A_2 f)^{(k)} = h^{(k)} + x f^{(k)} + k f^{(k-1)}
    const double v1 = h.d1(x) + x * d[1] + d[0];
    const double v2 = h.d2(x) + x * d[2] + 2.0 * d[1];
    if (std::abs(v1) > sup[0]) { sup[0] = std::abs(v1); at[0] = x; }
    if (std::abs(v2) > sup[1]) { sup[1] = std::abs(v2); at[1] = x; }
  }
  BoundReport rep;
  rep.grid_estimated_norms = h.grid_estimated;
  auto add = [&](const std::string& id, double lhs, double rhs, double wx) {
    BoundLine l{id, lhs, rhs, rhs - lhs, wx, lhs <= rhs * (1.0 + 1e-12)};
    rep.all_hold = rep.all_hold && l.holds;
    rep.lines.push_back(l);
  };
  // from the triangle inequality with the solution bounds above
  add("a2f_d1", sup[0], h.norm_d1 + (3.0 / sigma + 1.5 / sigma) * ht, at[0]);
  add("a2f_d2", sup[1],
      h.norm_d2 + (3.0 / (sigma * sigma) + 4.5 / (sigma * sigma)) * ht, at[1]);
  return rep;
}

std::vector<double> appendix_c_grid(int points) {
  std::vector<double> g(points);
  const double lo = 1e-6, hi = 50.0;
  const double r = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = lo * std::exp(r * i);
  return g;
}

BoundReport appendix_c_suite(const std::vector<double>& grid) {
  BoundReport rep;
  auto sup_over = [&](auto&& f) {
    double s = 0.0, at = 0.0;
    for (double x : grid) {
      const double v = std::abs(f(x));
      if (v > s) { s = v; at = x; }
    }
    return std::pair<double, double>{s, at};
  };
  auto add = [&](const std::string& id, auto&& f, double bound) {
    auto [lhs, at] = sup_over(f);
    BoundLine l{id, lhs, bound, bound - lhs, at, lhs <= bound * (1.0 + 1e-12)};
    rep.all_hold = rep.all_hold && l.holds;
    rep.lines.push_back(l);
  };
  const auto sc = sf::Scale::exp_scaled;
  // family rows keep the instance with the smallest margin
  auto add_family = [&](const std::string& id, auto&& inst_fn, auto&& bound_fn,
                        std::initializer_list<int> orders) {
    BoundLine worst;
    bool first = true;
    for (int n : orders) {
      auto f = [&](double x) { return inst_fn(n, x); };
      auto [lhs, at] = sup_over(f);
      const double b = bound_fn(n);
      BoundLine l{id, lhs, b, b - lhs, at, lhs <= b * (1.0 + 1e-12)};
      if (first || l.margin / l.rhs < worst.margin / worst.rhs) worst = l;
      first = false;
      rep.all_hold = rep.all_hold && l.holds;
    }
    rep.lines.push_back(worst);
  };
  add_family(
      "rep_int_n_k0_dn",
      [&](int n, double x) {
        return sf::repeated_integral_i0(n, x, sc) * sf::k0_deriv(n, x, sc);
      },
      [](int n) { return std::pow(2.0, n - 1); }, {1, 2, 3, 4});
  add_family(
      "x_rep_int_n_k0_dn",
      [&](int n, double x) {
        return x * sf::repeated_integral_i0(n, x, sc) * sf::k0_deriv(n, x, sc);
      },
      [](int n) { return std::pow(2.0, n - 1); }, {1, 2, 3, 4});
  add("rep_int1_k0",
      [&](double x) { return sf::repeated_integral_i0(1, x, sc) * sf::bessel_k(0, x, sc); },
      1.0);
  add("x_rep_int1_k0",
      [&](double x) {
        return x * sf::repeated_integral_i0(1, x, sc) * sf::bessel_k(0, x, sc);
      },
      1.0);
  // attains equality pi/2 in the limit x -> 0; include the endpoint
  {
    double lhs = sf::k0_tail_integral(0.0), at = 0.0;
    for (double x : grid) {
      const double v = std::abs(sf::bessel_i(0, x, sc) * sf::k0_tail_integral(x, sc));
      if (v > lhs) { lhs = v; at = x; }
    }
    BoundLine l{"i0_k0tail", lhs, kPi / 2.0, kPi / 2.0 - lhs, at,
                lhs <= kPi / 2.0 * (1.0 + 1e-12)};
    rep.all_hold = rep.all_hold && l.holds;
    rep.lines.push_back(l);
  }
  add("x_i0_k0tail",
      [&](double x) { return x * sf::bessel_i(0, x, sc) * sf::k0_tail_integral(x, sc); },
      0.615);
  // even-derivative family: the 0th-order instance tends to pi/2 > 1/4 +
  // sqrt(pi)/2 at the origin, so only the 2nd and 4th derivatives belong here
  // (the 0th is covered by the pi/2 row above)
  add_family(
      "i0_even_d_k0tail",
      [&](int k, double x) {
        return sf::i0_deriv(k, x, sc) * sf::k0_tail_integral(x, sc);
      },
      [](int) { return 0.25 + std::sqrt(kPi) / 2.0; }, {2, 4});
  add_family(
      "i0_odd_d_k0tail",
      [&](int k, double x) {
        return sf::i0_deriv(k, x, sc) * sf::k0_tail_integral(x, sc);
      },
      [](int) { return 0.5; }, {1, 3});
  add("x_i0_d1_k0tail",
      [&](double x) { return x * sf::i0_deriv(1, x, sc) * sf::k0_tail_integral(x, sc); },
      0.5);
  add("gap_i1_k0d2", [](double x) { return sf::i1int_k0d2_gap(x); }, 3.0);
  add("gap_i2_k0d3", [](double x) { return sf::i2int_k0d3_gap(x); }, 5.0);
  add("gap_i3_k0d4", [](double x) { return sf::i3int_k0d4_gap(x); }, 9.0);
  add("gap_i1_k0d3", [](double x) { return sf::i1int_k0d3_gap(x); }, 4.39);
  add("gap_i2_k0d4", [](double x) { return sf::i2int_k0d4_gap(x); }, 6.81);
  add("gap_i1_k0d4", [](double x) { return sf::i1int_k0d4_gap(x); }, 14.61);
  return rep;
}

}  // namespace pnstein::stein2
