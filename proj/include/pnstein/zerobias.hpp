// The order-n zero-bias transform of a mean-zero law: exact cdf/pdf/moments,
// constructive samplers via the square-bias factorisation, and the coupling
// constructions used by the convergence experiments.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnstein/rng.hpp"

namespace pnstein::zerobias {

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

// A mean-zero base law with finite nonzero variance.  All kinds carry a
// scalar multiplier so that scaled() is exact for every kind.
class BaseDist {
 public:
  enum class Kind { finite, gaussian, uniform, iid_sum, product };

  // Atoms must have positive probabilities summing to 1 and zero mean.
  static BaseDist finite(std::vector<Atom> atoms);
  static BaseDist rademacher();          // +-1 with probability 1/2
  static BaseDist gaussian(double sigma);
  static BaseDist uniform(double a, double b);  // requires b = -a (zero mean)
  // Sum of `count` iid copies of `inner`; standardized divides by the
  // standard deviation of the sum.
  static BaseDist iid_sum(BaseDist inner, int count, bool standardized);
  static BaseDist product(std::vector<BaseDist> factors);

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }
  double variance() const;
  double moment(int p) const;      // E W^p (closed form / exact convolution)
  double abs_moment(int p) const;  // E |W|^p
  double sample(Rng& rng) const;
  BaseDist scaled(double c) const;

  // True when the law has finite support once iid sums are convolved out.
  bool finite_support() const;
  // The explicit atom list (scale applied); throws for continuous kinds.
  // Convolutions beyond 10^6 atoms are rejected.
  std::vector<Atom> atoms_flat() const;

  const std::vector<BaseDist>& factors() const { return children_; }

 private:
  BaseDist() = default;
  Kind kind_ = Kind::finite;
  double scale_ = 1.0;
  std::vector<Atom> atoms_;          // finite
  double param_ = 0.0;               // gaussian sigma / uniform half-width
  std::vector<BaseDist> children_;   // iid_sum inner / product factors
  int count_ = 0;                    // iid_sum
};

struct ZeroBiasSpec {
  BaseDist base;
  int order = 1;
};

struct CouplingDraw {
  double w = 0.0;
  double w_star = 0.0;
  // index of the summand replaced in each factor of the construction
  std::vector<std::int64_t> replaced_indices;
};

// Draw from the square-bias law: E W^2 f(W) = E W^2 E f(W_sq).
double square_bias_sample(const BaseDist& base, Rng& rng);

// Draw from the order-n zero-bias law as V_n * W_sq with V_n a product of n
// independent U(0,1) variates.
double zero_bias_n_sample(const ZeroBiasSpec& spec, Rng& rng);

// Distribution function via the incomplete-gamma kernel formula.  Atoms
// exactly at w are included in the indicator (right-continuity).
double zero_bias_cdf(const ZeroBiasSpec& spec, double w);

// Density; throws std::domain_error at w = 0 (log divergence for n >= 2 /
// possible atom at the fold point).
double zero_bias_pdf(const ZeroBiasSpec& spec, double w);

// E (W^{*(n)})^p = E W^{p+2} / (sigma^2 (p+1)^n), or the absolute variant.
double zero_bias_moment(const ZeroBiasSpec& spec, int p, bool absolute);

// Replace-one-summand coupling: draws all summands, swaps the variance-
// weighted index I for an independent order-1 zero-bias draw.
CouplingDraw sum_zero_bias_coupling(const std::vector<BaseDist>& summands,
                                    Rng& rng);

// Product coupling: each factor is an independent sum of summands; each
// factor sum is coupled by sum_zero_bias_coupling and the products paired.
CouplingDraw product_zero_bias_coupling(
    const std::vector<std::vector<BaseDist>>& factors, Rng& rng);

struct ScaleCheckReport {
  double ks = 0.0;
  double critical = 0.0;
  bool pass = false;
};

// Distributional identity c * (W-zero-bias) = (cW)-zero-bias, checked by a
// two-sample KS test on `draws` samples per side.
ScaleCheckReport scale_transform_check(const ZeroBiasSpec& spec, double c,
                                       Rng& rng, std::int64_t draws = 1000000);

}  // namespace pnstein::zerobias
