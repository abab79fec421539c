// Deterministic seeded random streams (xoshiro256** with splitmix64 seeding).
//
// All samplers take a caller-owned Rng so that results are reproducible per
// seed and independent streams can be derived for parallel experiments
// (one root seed, per-task subsequence indices).
#pragma once

#include <cmath>
#include <cstdint>

namespace pnstein {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = splitmix64(x);
  }

  // Derived stream: same root seed, distinct substream index.
  static Rng stream(std::uint64_t root_seed, std::uint64_t index) {
    std::uint64_t x = root_seed;
    std::uint64_t mixed = splitmix64(x) ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return Rng(mixed);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Standard normal via polar Box-Muller (cached second variate).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * m;
    has_cached_ = true;
    return u * m;
  }

  double exponential() { return -std::log(uniform_open()); }

  // Gamma(n,1) for integer shape, as a sum of exponentials.
  double gamma_int(int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += exponential();
    return s;
  }

  // Product of n independent U(0,1) variates, drawn as exp(-Gamma(n,1)).
  double uniform_product(int n) { return std::exp(-gamma_int(n)); }

  // Uniform index in [0, n).
  std::uint64_t index(std::uint64_t n) {
    // Rejection-free for our purposes; modulo bias is < 2^-50 for n < 2^14.
    return next_u64() % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace pnstein
