#include "pnstein/testfn.hpp"

#include <cmath>
#include <stdexcept>

#include "pnstein/prodnormal.hpp"

namespace pnstein::testfn {

namespace {

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

std::vector<TestFn> build_catalogue() {
  std::vector<TestFn> v;

  TestFn fsin;
  fsin.name = "sin";
  fsin.h = [](double x) { return std::sin(x); };
  fsin.d1 = [](double x) { return std::cos(x); };
  fsin.d2 = [](double x) { return -std::sin(x); };
  fsin.d3 = [](double x) { return -std::cos(x); };
  fsin.sup = 1.0;
  fsin.inf = -1.0;
  fsin.norm_d1 = fsin.norm_d2 = fsin.norm_d3 = 1.0;
  fsin.odd = true;
  v.push_back(fsin);

  TestFn fcos;
  fcos.name = "cos";
  fcos.h = [](double x) { return std::cos(x); };
  fcos.d1 = [](double x) { return -std::sin(x); };
  fcos.d2 = [](double x) { return -std::cos(x); };
  fcos.d3 = [](double x) { return std::sin(x); };
  fcos.sup = 1.0;
  fcos.inf = -1.0;
  fcos.norm_d1 = fcos.norm_d2 = fcos.norm_d3 = 1.0;
  v.push_back(fcos);

  TestFn ftanh;
  ftanh.name = "tanh";
  ftanh.h = [](double x) { return std::tanh(x); };
  ftanh.d1 = sech2;
  ftanh.d2 = [](double x) { return -2.0 * sech2(x) * std::tanh(x); };
  ftanh.d3 = [](double x) {
    const double s = sech2(x);
    return 4.0 * s - 6.0 * s * s;  // 4 sech^2 tanh^2 - 2 sech^4
  };
  ftanh.sup = 1.0;
  ftanh.inf = -1.0;
  ftanh.norm_d1 = 1.0;
  ftanh.norm_d2 = 0.76980035891950102;  // 4/(3 sqrt 3) at tanh^2 = 1/3
  ftanh.norm_d3 = 2.0;                  // attained at 0
  ftanh.odd = true;
  v.push_back(ftanh);

  TestFn fbump;
  fbump.name = "bump";
  fbump.h = [](double x) { return std::exp(-x * x); };
  fbump.d1 = [](double x) { return -2.0 * x * std::exp(-x * x); };
  fbump.d2 = [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); };
  fbump.d3 = [](double x) {
    return (12.0 * x - 8.0 * x * x * x) * std::exp(-x * x);
  };
  fbump.sup = 1.0;
  fbump.inf = 0.0;
  fbump.norm_d1 = 0.85776388496070680;  // sqrt(2) e^{-1/2} at x = 1/sqrt 2
  fbump.norm_d2 = 2.0;                  // attained at 0
  fbump.norm_d3 = 3.9035661455399020;   // at x^2 = (12 - sqrt 96)/8
  v.push_back(fbump);

  TestFn fatan;
  fatan.name = "atan";
  fatan.h = [](double x) { return std::atan(x); };
  fatan.d1 = [](double x) { return 1.0 / (1.0 + x * x); };
  fatan.d2 = [](double x) {
    const double d = 1.0 + x * x;
    return -2.0 * x / (d * d);
  };
  fatan.d3 = [](double x) {
    const double d = 1.0 + x * x;
    return (6.0 * x * x - 2.0) / (d * d * d);
  };
  fatan.sup = 1.5707963267948966;
  fatan.inf = -1.5707963267948966;
  fatan.norm_d1 = 1.0;
  fatan.norm_d2 = 0.64951905283832899;  // 3 sqrt(3)/8 at x = 1/sqrt 3
  fatan.norm_d3 = 2.0;                  // attained at 0
  fatan.odd = true;
  v.push_back(fatan);

  return v;
}

}  // namespace

bool TestFn::derivatives_consistent() const {
  static const double kGrid[] = {-2.1, -0.7, 0.3, 1.1, 2.4};
  const double step = 1e-2;
  const std::function<double(double)> levels[] = {h, d1, d2, d3};
  for (int k = 1; k <= 3; ++k) {
    const auto& prev = levels[k - 1];
    const auto& cur = levels[k];
    for (double x : kGrid) {
      const double fd = (8.0 * (prev(x + step) - prev(x - step)) -
                         (prev(x + 2 * step) - prev(x - 2 * step))) /
                        (12.0 * step);
      if (std::abs(fd - cur(x)) > 1e-5 * std::max(1.0, std::abs(cur(x))))
        return false;
    }
  }
  return true;
}

const std::vector<TestFn>& catalogue() {
  static const std::vector<TestFn> kCat = build_catalogue();
  return kCat;
}

const TestFn& by_name(const std::string& name) {
  for (const auto& f : catalogue())
    if (f.name == name) return f;
  throw std::invalid_argument("unknown test function: " + name);
}

TestFn from_evaluators(std::string name, std::function<double(double)> h,
                       std::function<double(double)> d1,
                       std::function<double(double)> d2,
                       std::function<double(double)> d3) {
  TestFn f;
  f.name = std::move(name);
  f.h = std::move(h);
  f.d1 = std::move(d1);
  f.d2 = std::move(d2);
  f.d3 = std::move(d3);
  f.sup = -1e300;
  f.inf = 1e300;
  for (int i = 0; i <= 4000; ++i) {
    const double x = -60.0 + 0.03 * i;
    const double hv = f.h(x);
    f.sup = std::max(f.sup, hv);
    f.inf = std::min(f.inf, hv);
    f.norm_d1 = std::max(f.norm_d1, std::abs(f.d1(x)));
    f.norm_d2 = std::max(f.norm_d2, std::abs(f.d2(x)));
    f.norm_d3 = std::max(f.norm_d3, std::abs(f.d3(x)));
  }
  f.norm_d1 *= 1.05;
  f.norm_d2 *= 1.05;
  f.norm_d3 *= 1.05;
  f.grid_estimated = true;
  return f;
}

double pn2_mean(const TestFn& f, double sigma) {
  if (f.odd) return 0.0;
  prodnormal::PdfEvalConfig cfg;
  cfg.quad_tol = 1e-10;
  return prodnormal::expectation({2, sigma}, f.h, prodnormal::Method::quadrature,
                                 cfg);
}

double centered_norm(const TestFn& f, double c) {
  return std::max(f.sup - c, c - f.inf);
}

}  // namespace pnstein::testfn
