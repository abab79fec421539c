#include "pnstein/experiments.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pnstein/rng.hpp"
#include "pnstein/stats.hpp"

namespace pnstein::experiments {

namespace {

// Compensated summation so that the fixed-order reduction is reproducible
// and accurate at 10^6+ replications.
struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  void merge(const Kahan& o) {
    add(o.sum);
    add(-o.c);
  }
};

struct Accum {
  stats::Welford hw;   // h(W)
  stats::Welford l1;   // |W - W*|
  stats::Welford l2;   // (W - W*)^2
  Kahan sxx, sxy, sd2; // regression of d = W - W* on W through the origin

  void merge(const Accum& o) {
    hw.merge(o.hw);
    l1.merge(o.l1);
    l2.merge(o.l2);
    sxx.merge(o.sxx);
    sxy.merge(o.sxy);
    sd2.merge(o.sd2);
  }
};

void validate(const ExperimentConfig& cfg) {
  if (cfg.m < 2 || cfg.n < 2)
    throw std::invalid_argument("experiment: m and n must be >= 2");
  if (cfg.reps < 10000)
    throw std::invalid_argument("experiment: reps must be >= 10^4");
  if (std::abs(cfg.base_x.variance() - 1.0) > 1e-9 ||
      std::abs(cfg.base_y.variance() - 1.0) > 1e-9)
    throw std::invalid_argument("experiment: base laws must have unit variance");
}

double pn_reference_value(const ExperimentConfig& cfg) {
  switch (cfg.pn_reference) {
    case PnReference::quadrature:
      return testfn::pn2_mean(cfg.h, 1.0);
    case PnReference::closed_form:
      if (cfg.h.odd) return 0.0;
      if (cfg.h.name == "cos") return 1.0 / std::sqrt(2.0);
      throw std::invalid_argument(
          "experiment: no closed-form limit mean for '" + cfg.h.name + "'");
  }
  return 0.0;
}

Accum run_pipeline(const ExperimentConfig& cfg) {
  const std::vector<std::vector<zerobias::BaseDist>> factors{
      std::vector<zerobias::BaseDist>(
          cfg.m, cfg.base_x.scaled(1.0 / std::sqrt(static_cast<double>(cfg.m)))),
      std::vector<zerobias::BaseDist>(
          cfg.n, cfg.base_y.scaled(1.0 / std::sqrt(static_cast<double>(cfg.n))))};

  auto run_range = [&](std::int64_t lo, std::int64_t hi, Accum& acc) {
    for (std::int64_t r = lo; r < hi; ++r) {
      Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(r));
      const auto d = zerobias::product_zero_bias_coupling(factors, rng);
      const double hw = cfg.h.h(d.w);
      const double diff = d.w - d.w_star;
      acc.hw.add(hw);
      acc.l1.add(std::abs(diff));
      acc.l2.add(diff * diff);
      acc.sxx.add(d.w * d.w);
      acc.sxy.add(d.w * diff);
      acc.sd2.add(diff * diff);
      if (cfg.per_rep) cfg.per_rep(r, d.w, d.w_star, hw);
    }
  };

  const int threads = cfg.per_rep ? 1 : std::max(1, cfg.threads);
  Accum total;
  if (threads == 1) {
    run_range(0, cfg.reps, total);
    return total;
  }
  std::vector<Accum> parts(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  const std::int64_t chunk = (cfg.reps + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t lo = t * chunk;
    const std::int64_t hi = std::min(cfg.reps, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(
        [&, lo, hi, t]() { run_range(lo, hi, parts[static_cast<std::size_t>(t)]); });
  }
  for (auto& th : pool) th.join();
  // fixed chunk-order reduction: bit-reproducible for a given thread count
  for (const auto& p : parts) total.merge(p);
  return total;
}

ExperimentReport finish(const ExperimentConfig& cfg, const Accum& acc,
                        double pn_ref, double bound,
                        std::chrono::steady_clock::time_point t0) {
  ExperimentReport rep;
  rep.lhs_estimate = std::abs(acc.hw.mean() - pn_ref);
  rep.lhs_se = acc.hw.std_error();
  rep.coupling_l1 = acc.l1.mean();
  rep.coupling_l1_se = acc.l1.std_error();
  rep.coupling_l2 = acc.l2.mean();
  rep.coupling_l2_se = acc.l2.std_error();
  const double nreps = static_cast<double>(cfg.reps);
  rep.conditional_term = acc.sxy.sum / acc.sxx.sum;
  const double rss =
      std::max(0.0, acc.sd2.sum - acc.sxy.sum * acc.sxy.sum / acc.sxx.sum);
  rep.conditional_se = std::sqrt(rss / (nreps - 1.0) / acc.sxx.sum);
  const double m = cfg.m, n = cfg.n;
  rep.conditional_exact = 1.0 / m + 1.0 / n - 1.0 / (m * n);
  rep.bound_value = bound;
  rep.pass = rep.lhs_estimate <= bound;
  rep.conclusive = 4.0 * rep.lhs_se <= bound - rep.lhs_estimate;
  rep.reps = cfg.reps;
  rep.seed = cfg.seed;
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace

ExperimentReport run_corollary_4_2(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const double pn_ref = pn_reference_value(cfg);
  const double htilde = testfn::centered_norm(cfg.h, pn_ref);
  const double bound = (13.0 / 8.0) *
                       (1.0 / std::sqrt(static_cast<double>(cfg.m)) +
                        1.0 / std::sqrt(static_cast<double>(cfg.n))) *
                       (cfg.h.norm_d1 + 4.5 * htilde) *
                       cfg.base_x.abs_moment(3) * cfg.base_y.abs_moment(3);
  const Accum acc = run_pipeline(cfg);
  return finish(cfg, acc, pn_ref, bound, t0);
}

ExperimentReport run_corollary_4_3(const ExperimentConfig& cfg) {
  validate(cfg);
  if (std::abs(cfg.base_x.moment(3)) > 1e-9 ||
      std::abs(cfg.base_y.moment(3)) > 1e-9)
    throw std::invalid_argument(
        "experiment: fourth-moment bound needs symmetric bases (E X^3 = 0)");
  const auto t0 = std::chrono::steady_clock::now();
  const double pn_ref = pn_reference_value(cfg);
  const double htilde = testfn::centered_norm(cfg.h, pn_ref);
  const double bound =
      (1.0 / cfg.m + 1.0 / cfg.n) *
      (3.5 * cfg.h.norm_d2 + cfg.h.norm_d1 + 30.75 * htilde) *
      cfg.base_x.moment(4) * cfg.base_y.moment(4);
  const Accum acc = run_pipeline(cfg);
  return finish(cfg, acc, pn_ref, bound, t0);
}

ExperimentReport estimate_coupling_terms(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const double pn_ref = pn_reference_value(cfg);
  const double l1_bound = (13.0 / 8.0) *
                          (1.0 / std::sqrt(static_cast<double>(cfg.m)) +
                           1.0 / std::sqrt(static_cast<double>(cfg.n))) *
                          cfg.base_x.abs_moment(3) * cfg.base_y.abs_moment(3);
  const double l2_bound = 7.0 * (1.0 / cfg.m + 1.0 / cfg.n) *
                          cfg.base_x.moment(4) * cfg.base_y.moment(4);
  const Accum acc = run_pipeline(cfg);
  ExperimentReport rep = finish(cfg, acc, pn_ref, l1_bound, t0);
  rep.pass = rep.coupling_l1 <= l1_bound && rep.coupling_l2 <= l2_bound &&
             std::abs(rep.conditional_term - rep.conditional_exact) <=
                 4.0 * rep.conditional_se;
  rep.conclusive = 4.0 * rep.coupling_l1_se <= l1_bound - rep.coupling_l1;
  return rep;
}

RateFit rate_fit(const std::vector<double>& sizes,
                 const std::vector<double>& lhs,
                 const std::vector<double>& lhs_se) {
  if (sizes.size() < 3 || sizes.size() != lhs.size())
    throw std::invalid_argument("rate_fit: need at least 3 matched points");
  if (!lhs_se.empty() && lhs_se.size() != lhs.size())
    throw std::invalid_argument("rate_fit: lhs_se size mismatch");
  std::vector<double> x(sizes.size()), y(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] <= 0.0 || lhs[i] <= 0.0)
      throw std::invalid_argument("rate_fit: sizes and lhs must be positive");
    x[i] = std::log(sizes[i]);
    y[i] = std::log(lhs[i]);
  }
  const auto fit = stats::ols(x, y);
  RateFit out;
  out.slope = fit.slope;
  double prop2 = 0.0;
  if (!lhs_se.empty()) {
    double mx = 0.0, sxx = 0.0;
    for (double v : x) mx += v;
    mx /= static_cast<double>(x.size());
    for (double v : x) sxx += (v - mx) * (v - mx);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double a = (x[i] - mx) / sxx;          // slope weight
      const double se_log = lhs_se[i] / lhs[i];    // delta method
      prop2 += a * a * se_log * se_log;
    }
  }
  out.stderr_ = std::sqrt(fit.slope_se * fit.slope_se + prop2);
  return out;
}

}  // namespace pnstein::experiments
