// Small statistics toolkit: Kolmogorov-Smirnov tests, a chi-square
// goodness-of-fit test, streaming moments, and least squares.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace pnstein::stats {

// sup_x |F_n(x) - F(x)| for a sample against a distribution function.
// The sample is copied and sorted internally.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

// Two-sample KS statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// 1% critical values: c(alpha=0.01) = 1.6276, scaled by the effective
// sample size.
double ks_critical_1pct(std::size_t n);
double ks_two_sample_critical_1pct(std::size_t n, std::size_t m);

// Pearson chi-square statistic for observed counts against expected counts.
double chi_square_stat(const std::vector<double>& observed,
                       const std::vector<double>& expected);
// 1% critical value of chi-square with df degrees of freedom (df <= 10).
double chi_square_critical_1pct(int df);

// Streaming mean/variance accumulator.
class Welford {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  // Combine with another accumulator (Chan's parallel update).
  void merge(const Welford& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) { *this = o; return; }
    const double total = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) *
                       static_cast<double>(o.n_) / total;
    mean_ += d * static_cast<double>(o.n_) / total;
    n_ += o.n_;
  }
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

// Ordinary least squares of y on x (with intercept).
OlsFit ols(const std::vector<double>& x, const std::vector<double>& y);

// Least squares through the origin: y ~ beta x.
double ols_through_origin(const std::vector<double>& x,
                          const std::vector<double>& y, double* se_out = nullptr);

}  // namespace pnstein::stats
