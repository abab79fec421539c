// Minimal double-double arithmetic (~31 significant digits).
//
// Used only for the small-argument Bessel bracket kernels, where terms of
// size O(1/x^4) cancel to an O(1) result and plain doubles lose everything.
#pragma once

#include <cmath>

namespace pnstein {

struct DDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DDouble() = default;
  constexpr DDouble(double h) : hi(h), lo(0.0) {}
  constexpr DDouble(double h, double l) : hi(h), lo(l) {}

  double value() const { return hi + lo; }
};

namespace dd {

inline DDouble two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DDouble quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline DDouble two_prod(double a, double b) {
  double p = a * b;
  double err = std::fma(a, b, -p);
  return {p, err};
}

inline DDouble add(const DDouble& a, const DDouble& b) {
  DDouble s = two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  return quick_two_sum(s.hi, lo);
}

inline DDouble sub(const DDouble& a, const DDouble& b) {
  return add(a, {-b.hi, -b.lo});
}

inline DDouble mul(const DDouble& a, const DDouble& b) {
  DDouble p = two_prod(a.hi, b.hi);
  double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, lo);
}

inline DDouble div(const DDouble& a, const DDouble& b) {
  double q1 = a.hi / b.hi;
  DDouble r = sub(a, mul({q1, 0.0}, b));
  double q2 = r.hi / b.hi;
  r = sub(r, mul({q2, 0.0}, b));
  double q3 = r.hi / b.hi;
  DDouble q = quick_two_sum(q1, q2);
  return add(q, {q3, 0.0});
}

inline constexpr DDouble kLn2{0.6931471805599453, 2.3190468138462996e-17};
inline constexpr DDouble kEulerGamma{0.5772156649015329, -4.942915152430645e-18};

// log(x) for x in (0, 2): frexp split plus atanh series for the mantissa.
inline DDouble log(double x) {
  int e = 0;
  double m = std::frexp(x, &e);  // x = m * 2^e, m in [0.5, 1)
  // log(m) = 2 atanh((m-1)/(m+1)); |z| <= 1/3 so the series converges fast.
  DDouble z = div({m - 1.0, 0.0}, {m + 1.0, 0.0});
  DDouble z2 = mul(z, z);
  DDouble term = z;
  DDouble sum = z;
  for (int k = 1; k < 40; ++k) {
    term = mul(term, z2);
    DDouble contrib = div(term, {2.0 * k + 1.0, 0.0});
    sum = add(sum, contrib);
    if (std::abs(contrib.hi) < 1e-35 * std::abs(sum.hi)) break;
  }
  DDouble logm = mul({2.0, 0.0}, sum);
  return add(logm, mul({static_cast<double>(e), 0.0}, kLn2));
}

}  // namespace dd

// Operators live alongside DDouble so ADL finds them everywhere.
inline DDouble operator+(const DDouble& a, const DDouble& b) { return dd::add(a, b); }
inline DDouble operator-(const DDouble& a, const DDouble& b) { return dd::sub(a, b); }
inline DDouble operator*(const DDouble& a, const DDouble& b) { return dd::mul(a, b); }
inline DDouble operator/(const DDouble& a, const DDouble& b) { return dd::div(a, b); }
inline DDouble operator-(const DDouble& a) { return {-a.hi, -a.lo}; }

}  // namespace pnstein
