// The bounded solution of the second-order Stein equation
//   sigma^2 x f''(x) + sigma^2 f'(x) - x f(x) = h(x) - E h(Z),
// Z distributed as the product of two centred normals with scale sigma.
// Provides the solution, its first four derivatives, the equation residual,
// and the bound-verification suites.
#pragma once

#include <string>
#include <vector>

#include "pnstein/testfn.hpp"

namespace pnstein::stein2 {

struct BoundLine {
  std::string id;       // which inequality
  double lhs = 0.0;     // observed supremum
  double rhs = 0.0;     // asserted bound
  double margin = 0.0;  // rhs - lhs
  double worst_x = 0.0; // grid point attaining the supremum
  bool holds = false;
};

struct BoundReport {
  std::vector<BoundLine> lines;
  bool all_hold = true;
  bool grid_estimated_norms = false;
};

class SteinSol2 {
 public:
  SteinSol2(const testfn::TestFn& h, double sigma);

  double sigma() const { return sigma_; }
  double pn2h() const { return pn2h_; }           // cached E h(Z)
  double htilde_norm() const { return hnorm_; }   // sup |h - E h(Z)|
  double htilde(double x) const;

  // f, and f^{(k)} for k in 1..4.  Negative x served by reflection of the
  // centred test function; |x| below 1e-7 evaluated at the clamp (the
  // regrouped forms are continuous there).
  double value(double x) const;
  double deriv(int k, double x) const;

  // sigma^2 x f'' + sigma^2 f' - x f - htilde(x).
  double residual(double x) const;

 private:
  testfn::TestFn h_;
  double sigma_;
  double pn2h_;
  double hnorm_;
};

// Default verification grid: 0 and +-log-spaced points covering
// [1e-4 sigma, 50 sigma].
std::vector<double> default_grid(double sigma, int points_per_side = 400);

// The eight supremum bounds on f .. f'''' and x f, x f', x f'' in terms of
// the norms of h and its derivatives.
BoundReport verify_thm_bounds(const testfn::TestFn& h, double sigma,
                              const std::vector<double>& grid);

// The two closed bounds on sigma^2 (A_2 f)' and sigma^2 (A_2 f)''.
BoundReport verify_arflem(const testfn::TestFn& h, double sigma,
                          const std::vector<double>& grid);

// The 15-inequality corpus for Bessel-kernel expressions on (0, 50].
BoundReport appendix_c_suite(const std::vector<double>& grid);
std::vector<double> appendix_c_grid(int points = 2048);

}  // namespace pnstein::stein2
