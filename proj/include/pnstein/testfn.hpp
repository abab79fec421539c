// Named bounded test functions with analytic derivatives and sup norms,
// used by the Stein-equation bound suites and the convergence experiments.
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pnstein::testfn {

struct TestFn {
  std::string name;
  std::function<double(double)> h;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> d3;
  double sup = 0.0;       // sup of h over the real line
  double inf = 0.0;       // inf of h
  double norm_d1 = 0.0;   // sup |h'|
  double norm_d2 = 0.0;   // sup |h''|
  double norm_d3 = 0.0;   // sup |h'''|
  bool odd = false;       // h(-x) = -h(x); makes symmetric-law expectations 0
  bool grid_estimated = false;  // norms estimated on a grid (inflated 5%)

  // Checks each declared derivative against a finite difference of the
  // previous level on a small probe grid.
  bool derivatives_consistent() const;
};

// The named catalogue: sin, cos, tanh, gaussian-bump (e^{-x^2}), arctan.
const std::vector<TestFn>& catalogue();
const TestFn& by_name(const std::string& name);

// Builds a TestFn from evaluators alone; range and derivative norms are
// taken as grid suprema over [-60, 60] inflated by 5% as a guard band.
TestFn from_evaluators(std::string name, std::function<double(double)> h,
                       std::function<double(double)> d1,
                       std::function<double(double)> d2,
                       std::function<double(double)> d3);

// E h(Z) for Z ~ PN(2, sigma^2) by quadrature (0 immediately for odd h).
double pn2_mean(const TestFn& f, double sigma);

// sup |h - c| over the real line given the range of h.
double centered_norm(const TestFn& f, double c);

}  // namespace pnstein::testfn
