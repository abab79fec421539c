#include "pnstein/zerobias.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "pnstein/quad.hpp"
#include "pnstein/specfun.hpp"
#include "pnstein/stats.hpp"

namespace pnstein::zerobias {

namespace {

constexpr double kPi = 3.14159265358979323846;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double double_factorial_odd(int p) {  // (p-1)!! for even p
  double f = 1.0;
  for (int k = p - 1; k > 1; k -= 2) f *= k;
  return f;
}

// gamma(n, log(v/w)) saturated to (n-1)! when w = 0 (infinite argument).
// log(v/w) clamped at 0: quadrature nodes can land a rounding error past the
// indicator boundary v = w.
double log_ratio(double v, double w) {
  return std::max(0.0, std::log(v / w));
}

double gamma_log_ratio(int n, double v, double w) {
  if (w == 0.0) return factorial(n - 1);
  return specfun::lower_incomplete_gamma(n, log_ratio(v, w));
}

}  // namespace

BaseDist BaseDist::finite(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("BaseDist: no atoms");
  double psum = 0.0, mean = 0.0, var = 0.0;
  for (const auto& a : atoms) {
    if (a.prob <= 0.0) throw std::invalid_argument("BaseDist: nonpositive prob");
    psum += a.prob;
    mean += a.prob * a.value;
  }
  if (std::abs(psum - 1.0) > 1e-12)
    throw std::invalid_argument("BaseDist: probabilities must sum to 1");
  if (std::abs(mean) > 1e-12)
    throw std::invalid_argument("BaseDist: mean must be 0");
  for (const auto& a : atoms) var += a.prob * a.value * a.value;
  if (var <= 0.0) throw std::invalid_argument("BaseDist: zero variance");
  BaseDist d;
  d.kind_ = Kind::finite;
  d.atoms_ = std::move(atoms);
  std::sort(d.atoms_.begin(), d.atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  return d;
}

BaseDist BaseDist::rademacher() {
  return finite({{-1.0, 0.5}, {1.0, 0.5}});
}

BaseDist BaseDist::gaussian(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("BaseDist: sigma must be positive");
  BaseDist d;
  d.kind_ = Kind::gaussian;
  d.param_ = sigma;
  return d;
}

BaseDist BaseDist::uniform(double a, double b) {
  if (!(a < b) || std::abs(a + b) > 1e-12)
    throw std::invalid_argument("BaseDist: uniform must be symmetric (b = -a)");
  BaseDist d;
  d.kind_ = Kind::uniform;
  d.param_ = b;
  return d;
}

BaseDist BaseDist::iid_sum(BaseDist inner, int count, bool standardized) {
  if (count < 1) throw std::invalid_argument("BaseDist: count must be >= 1");
  // a sum of gaussians is gaussian; keep it closed-form
  if (inner.kind_ == Kind::gaussian) {
    const double s = inner.param_ * std::abs(inner.scale_) *
                     std::sqrt(static_cast<double>(count));
    return gaussian(standardized ? 1.0 : s);
  }
  BaseDist d;
  d.kind_ = Kind::iid_sum;
  d.count_ = count;
  const double var = inner.variance() * static_cast<double>(count);
  d.children_.push_back(std::move(inner));
  if (standardized) d.scale_ = 1.0 / std::sqrt(var);
  return d;
}

BaseDist BaseDist::product(std::vector<BaseDist> factors) {
  if (factors.empty()) throw std::invalid_argument("BaseDist: no factors");
  BaseDist d;
  d.kind_ = Kind::product;
  d.children_ = std::move(factors);
  return d;
}

double BaseDist::variance() const {
  const double s2 = scale_ * scale_;
  switch (kind_) {
    case Kind::finite: {
      double v = 0.0;
      for (const auto& a : atoms_) v += a.prob * a.value * a.value;
      return s2 * v;
    }
    case Kind::gaussian: return s2 * param_ * param_;
    case Kind::uniform: return s2 * param_ * param_ / 3.0;
    case Kind::iid_sum:
      return s2 * children_[0].variance() * static_cast<double>(count_);
    case Kind::product: {
      double v = 1.0;
      for (const auto& c : children_) v *= c.variance();
      return s2 * v;
    }
  }
  return 0.0;
}

double BaseDist::moment(int p) const {
  if (p < 0) throw std::invalid_argument("moment: p must be >= 0");
  const double sp = std::pow(scale_, p);
  switch (kind_) {
    case Kind::finite: {
      double m = 0.0;
      for (const auto& a : atoms_) m += a.prob * std::pow(a.value, p);
      return sp * m;
    }
    case Kind::gaussian:
      if (p % 2 == 1) return 0.0;
      return sp * std::pow(param_, p) * double_factorial_odd(p);
    case Kind::uniform:
      if (p % 2 == 1) return 0.0;
      return sp * std::pow(param_, p) / static_cast<double>(p + 1);
    case Kind::iid_sum: {
      double m = 0.0;
      for (const auto& a : atoms_flat()) m += a.prob * std::pow(a.value, p);
      return m;
    }
    case Kind::product: {
      double m = 1.0;
      for (const auto& c : children_) m *= c.moment(p);
      return sp * m;
    }
  }
  return 0.0;
}

double BaseDist::abs_moment(int p) const {
  if (p < 0) throw std::invalid_argument("abs_moment: p must be >= 0");
  const double sp = std::pow(std::abs(scale_), p);
  switch (kind_) {
    case Kind::finite: {
      double m = 0.0;
      for (const auto& a : atoms_) m += a.prob * std::pow(std::abs(a.value), p);
      return sp * m;
    }
    case Kind::gaussian:
      // E |N(0,s)|^p = s^p 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
      return sp * std::pow(param_, p) * std::pow(2.0, 0.5 * p) *
             std::tgamma(0.5 * (p + 1)) / std::sqrt(kPi);
    case Kind::uniform:
      return sp * std::pow(param_, p) / static_cast<double>(p + 1);
    case Kind::iid_sum: {
      double m = 0.0;
      for (const auto& a : atoms_flat()) m += a.prob * std::pow(std::abs(a.value), p);
      return m;
    }
    case Kind::product: {
      double m = 1.0;
      for (const auto& c : children_) m *= c.abs_moment(p);
      return sp * m;
    }
  }
  return 0.0;
}

double BaseDist::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::finite: {
      double u = rng.uniform();
      for (const auto& a : atoms_) {
        if (u < a.prob) return scale_ * a.value;
        u -= a.prob;
      }
      return scale_ * atoms_.back().value;
    }
    case Kind::gaussian: return scale_ * param_ * rng.normal();
    case Kind::uniform: return scale_ * rng.uniform(-param_, param_);
    case Kind::iid_sum: {
      double s = 0.0;
      for (int i = 0; i < count_; ++i) s += children_[0].sample(rng);
      return scale_ * s;
    }
    case Kind::product: {
      double s = 1.0;
      for (const auto& c : children_) s *= c.sample(rng);
      return scale_ * s;
    }
  }
  return 0.0;
}

BaseDist BaseDist::scaled(double c) const {
  if (c == 0.0) throw std::invalid_argument("scaled: c must be nonzero");
  BaseDist d = *this;
  d.scale_ *= c;
  return d;
}

bool BaseDist::finite_support() const {
  switch (kind_) {
    case Kind::finite: return true;
    case Kind::iid_sum: return children_[0].finite_support();
    case Kind::product:
      for (const auto& c : children_)
        if (!c.finite_support()) return false;
      return true;
    default: return false;
  }
}

std::vector<Atom> BaseDist::atoms_flat() const {
  if (!finite_support())
    throw std::invalid_argument("atoms_flat: law is not finitely supported");
  auto merge = [](std::vector<Atom> v) {
    std::map<double, double> m;
    for (const auto& a : v) {
      auto it = m.lower_bound(a.value - 1e-11 * std::max(1.0, std::abs(a.value)));
      if (it != m.end() &&
          std::abs(it->first - a.value) <=
              1e-11 * std::max(1.0, std::abs(a.value)))
        it->second += a.prob;
      else
        m.emplace(a.value, a.prob);
    }
    std::vector<Atom> out;
    out.reserve(m.size());
    for (auto& [val, p] : m) out.push_back({val, p});
    return out;
  };
  std::vector<Atom> acc;
  switch (kind_) {
    case Kind::finite:
      acc = atoms_;
      break;
    case Kind::iid_sum: {
      const auto inner = children_[0].atoms_flat();
      acc = {{0.0, 1.0}};
      for (int i = 0; i < count_; ++i) {
        std::vector<Atom> next;
        next.reserve(acc.size() * inner.size());
        if (acc.size() * inner.size() > 1000000)
          throw std::overflow_error("atoms_flat: convolution above 10^6 atoms");
        for (const auto& a : acc)
          for (const auto& b : inner)
            next.push_back({a.value + b.value, a.prob * b.prob});
        acc = merge(std::move(next));
      }
      break;
    }
    case Kind::product: {
      acc = {{1.0, 1.0}};
      for (const auto& c : children_) {
        const auto f = c.atoms_flat();
        std::vector<Atom> next;
        if (acc.size() * f.size() > 1000000)
          throw std::overflow_error("atoms_flat: product above 10^6 atoms");
        for (const auto& a : acc)
          for (const auto& b : f)
            next.push_back({a.value * b.value, a.prob * b.prob});
        acc = merge(std::move(next));
      }
      break;
    }
    default: break;
  }
  if (scale_ != 1.0)
    for (auto& a : acc) a.value *= scale_;
  if (scale_ < 0.0) std::sort(acc.begin(), acc.end(), [](const Atom& a, const Atom& b) {
    return a.value < b.value;
  });
  return acc;
}

double square_bias_sample(const BaseDist& base, Rng& rng) {
  switch (base.kind()) {
    case BaseDist::Kind::gaussian: {
      // the w^2-tilted normal has chi(3)-distributed magnitude
      const double a = rng.normal(), b = rng.normal(), c = rng.normal();
      const double mag = std::sqrt(a * a + b * b + c * c);
      const double sigma = std::sqrt(base.variance());
      return (rng.bernoulli(0.5) ? sigma : -sigma) * mag;
    }
    case BaseDist::Kind::uniform: {
      // tilted density 3x^2/(2a^3) on (-a, a); inverse cdf is a cube root
      const double a = std::sqrt(3.0 * base.variance());
      return a * std::cbrt(2.0 * rng.uniform() - 1.0);
    }
    case BaseDist::Kind::product: {
      double s = base.scale();
      for (const auto& c : base.factors()) s *= square_bias_sample(c, rng);
      return s;
    }
    default: {
      const auto atoms = base.atoms_flat();  // throws for unsupported kinds
      double z = 0.0;
      for (const auto& a : atoms) z += a.prob * a.value * a.value;
      double u = rng.uniform() * z;
      for (const auto& a : atoms) {
        const double wgt = a.prob * a.value * a.value;
        if (u < wgt) return a.value;
        u -= wgt;
      }
      return atoms.back().value;
    }
  }
}

double zero_bias_n_sample(const ZeroBiasSpec& spec, Rng& rng) {
  if (spec.order < 1) throw std::invalid_argument("zero bias order must be >= 1");
  return rng.uniform_product(spec.order) * square_bias_sample(spec.base, rng);
}

namespace {

// E[g(W) 1(W on the w-side)] for the cdf/pdf kernels; finite bases are exact
// sums, gaussian/uniform integrate the weighted density.
template <class G>
double side_expectation(const BaseDist& base, double w, bool upper, G&& g) {
  if (base.finite_support() || base.kind() == BaseDist::Kind::product ||
      base.kind() == BaseDist::Kind::iid_sum) {
    double s = 0.0;
    for (const auto& a : base.atoms_flat())
      if (upper ? (a.value >= w) : (a.value <= w)) s += a.prob * g(a.value);
    return s;
  }
  quad::Options opt{1e-12, 1e-10, 30};
  double lo0, hi0;
  std::function<double(double)> dens;
  if (base.kind() == BaseDist::Kind::uniform) {
    const double a = std::sqrt(3.0 * base.variance());
    lo0 = -a;
    hi0 = a;
    dens = [a, &g](double x) { return g(x) / (2.0 * a); };
  } else if (base.kind() == BaseDist::Kind::gaussian) {
    const double s = std::sqrt(base.variance());
    lo0 = -12.0 * s;
    hi0 = 12.0 * s;
    dens = [s, &g](double x) {
      const double z = x / s;
      return g(x) * std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * kPi));
    };
  } else {
    throw std::invalid_argument("zero bias: unsupported base kind");
  }
  // refine toward the indicator boundary at w (kernel kink / steep tails)
  if (upper) {
    const double lo = std::max(w, lo0);
    if (lo >= hi0) return 0.0;
    return quad::integrate_log_singular(dens, lo, hi0, opt).value;
  }
  const double hi = std::min(w, hi0);
  if (hi <= lo0) return 0.0;
  auto refl = [&](double x) { return dens(lo0 + hi - x); };
  return quad::integrate_log_singular(refl, lo0, hi, opt).value;
}

}  // namespace

double zero_bias_cdf(const ZeroBiasSpec& spec, double w) {
  if (spec.order < 1) throw std::invalid_argument("zero bias order must be >= 1");
  const int n = spec.order;
  const double s2 = spec.base.variance();
  const double c = 1.0 / (factorial(n - 1) * s2);
  if (w < 0.0) {
    const double e = side_expectation(
        spec.base, w, false,
        [&](double v) { return v * v * gamma_log_ratio(n, v, w); });
    return c * e;
  }
  const double e = side_expectation(
      spec.base, w, true,
      [&](double v) { return v * v * gamma_log_ratio(n, v, w); });
  return 1.0 - c * e;
}

double zero_bias_pdf(const ZeroBiasSpec& spec, double w) {
  if (spec.order < 1) throw std::invalid_argument("zero bias order must be >= 1");
  if (w == 0.0)
    throw std::domain_error("zero bias density is singular at 0");
  const int n = spec.order;
  const double s2 = spec.base.variance();
  const double c = 1.0 / (factorial(n - 1) * s2);
  auto kern = [&](double v) { return v * std::pow(log_ratio(v, w), n - 1); };
  if (w < 0.0)
    return -c * side_expectation(spec.base, w, false, kern);
  return c * side_expectation(spec.base, w, true, kern);
}

double zero_bias_moment(const ZeroBiasSpec& spec, int p, bool absolute) {
  if (spec.order < 1) throw std::invalid_argument("zero bias order must be >= 1");
  if (p < 0) throw std::invalid_argument("zero bias moment: p must be >= 0");
  const double num =
      absolute ? spec.base.abs_moment(p + 2) : spec.base.moment(p + 2);
  return num / (spec.base.variance() *
                std::pow(static_cast<double>(p + 1), spec.order));
}

CouplingDraw sum_zero_bias_coupling(const std::vector<BaseDist>& summands,
                                    Rng& rng) {
  if (summands.empty())
    throw std::invalid_argument("sum_zero_bias_coupling: no summands");
  double total_var = 0.0;
  for (const auto& s : summands) total_var += s.variance();
  std::vector<double> draws(summands.size());
  double w = 0.0;
  for (std::size_t i = 0; i < summands.size(); ++i) {
    draws[i] = summands[i].sample(rng);
    w += draws[i];
  }
  double u = rng.uniform() * total_var;
  std::size_t idx = summands.size() - 1;
  for (std::size_t i = 0; i < summands.size(); ++i) {
    if (u < summands[i].variance()) { idx = i; break; }
    u -= summands[i].variance();
  }
  const double star =
      rng.uniform_product(1) * square_bias_sample(summands[idx], rng);
  CouplingDraw d;
  d.w = w;
  d.w_star = w - draws[idx] + star;
  d.replaced_indices.push_back(static_cast<std::int64_t>(idx));
  return d;
}

CouplingDraw product_zero_bias_coupling(
    const std::vector<std::vector<BaseDist>>& factors, Rng& rng) {
  if (factors.empty())
    throw std::invalid_argument("product_zero_bias_coupling: no factors");
  CouplingDraw d;
  d.w = 1.0;
  d.w_star = 1.0;
  for (const auto& f : factors) {
    const CouplingDraw part = sum_zero_bias_coupling(f, rng);
    d.w *= part.w;
    d.w_star *= part.w_star;
    d.replaced_indices.push_back(part.replaced_indices[0]);
  }
  return d;
}

ScaleCheckReport scale_transform_check(const ZeroBiasSpec& spec, double c,
                                       Rng& rng, std::int64_t draws) {
  if (c == 0.0) throw std::invalid_argument("scale_transform_check: c nonzero");
  const ZeroBiasSpec scaled{spec.base.scaled(c), spec.order};
  std::vector<double> a(static_cast<std::size_t>(draws));
  std::vector<double> b(static_cast<std::size_t>(draws));
  for (auto& v : a) v = c * zero_bias_n_sample(spec, rng);
  for (auto& v : b) v = zero_bias_n_sample(scaled, rng);
  ScaleCheckReport rep;
  rep.ks = stats::ks_two_sample(std::move(a), std::move(b));
  rep.critical = stats::ks_two_sample_critical_1pct(
      static_cast<std::size_t>(draws), static_cast<std::size_t>(draws));
  rep.pass = rep.ks < rep.critical;
  return rep;
}

}  // namespace pnstein::zerobias
