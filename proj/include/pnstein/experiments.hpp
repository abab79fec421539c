// Monte Carlo convergence experiments for products of two standardized sums:
// bound dominance for the explicit rate corollaries, coupling-distance
// estimates, the exact conditional-coefficient identity, and log-log rate
// fits across a ladder of sample sizes.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pnstein/testfn.hpp"
#include "pnstein/zerobias.hpp"

namespace pnstein::experiments {

enum class PnReference { quadrature, closed_form };

struct ExperimentConfig {
  int m = 2;  // summands in the first factor
  int n = 2;  // summands in the second factor
  zerobias::BaseDist base_x = zerobias::BaseDist::rademacher();
  zerobias::BaseDist base_y = zerobias::BaseDist::rademacher();
  testfn::TestFn h = testfn::by_name("cos");
  std::int64_t reps = 10000;
  std::uint64_t seed = 1;
  PnReference pn_reference = PnReference::quadrature;
  int threads = 1;
  // Optional per-replication sink (rep, w, w_star, h(w)); forces a single
  // thread so rows arrive in replication order.
  std::function<void(std::int64_t, double, double, double)> per_rep;
};

struct ExperimentReport {
  double lhs_estimate = 0.0;  // |E h(W) - E h(Z)|, Z the product-normal limit
  double lhs_se = 0.0;
  double coupling_l1 = 0.0;  // E |W - W*|
  double coupling_l1_se = 0.0;
  double coupling_l2 = 0.0;  // E (W - W*)^2
  double coupling_l2_se = 0.0;
  double conditional_term = 0.0;  // fitted coefficient of E[W - W* | W] = c W
  double conditional_se = 0.0;
  double conditional_exact = 0.0;  // 1/m + 1/n - 1/(mn)
  double bound_value = 0.0;
  bool pass = false;
  bool conclusive = false;  // 4 SE below the margin to the bound
  double runtime_seconds = 0.0;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
};

// Smooth-metric bound with third absolute moments:
// (13/8)(1/sqrt(m) + 1/sqrt(n)) [||h'|| + (9/2)||h - Eh(Z)||] E|X|^3 E|Y|^3.
ExperimentReport run_corollary_4_2(const ExperimentConfig& cfg);

// Symmetric-base bound with fourth moments:
// (1/m + 1/n) [(7/2)||h''|| + ||h'|| + (123/4)||h - Eh(Z)||] E X^4 E Y^4.
ExperimentReport run_corollary_4_3(const ExperimentConfig& cfg);

// Coupling-distance report: checks E|W - W*| against
// (13/8)(1/sqrt(m) + 1/sqrt(n)) E|X|^3 E|Y|^3, E(W - W*)^2 against
// 7 (1/m + 1/n) E X^4 E Y^4, and the conditional coefficient against
// 1/m + 1/n - 1/(mn).
ExperimentReport estimate_coupling_terms(const ExperimentConfig& cfg);

struct RateFit {
  double slope = 0.0;
  double stderr_ = 0.0;  // OLS error plus propagated MC error
};

// Least squares of log(lhs) on log(m); lhs_se (optional, may be empty)
// propagates per-point MC errors into the slope error.
RateFit rate_fit(const std::vector<double>& sizes,
                 const std::vector<double>& lhs,
                 const std::vector<double>& lhs_se = {});

}  // namespace pnstein::experiments
