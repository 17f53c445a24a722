#pragma once

#include <cmath>
#include <cstdint>

namespace hpic {

// Counter-based generator: every particle index owns an independent
// SplitMix64 stream derived from (seed, stream). Sampling a given index
// therefore yields the same values no matter how work is split across
// threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed ^ mix(stream + 0x1f123bb5159a55e5ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1].
  double u01_open_low() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; no caching so the draw count per
  // particle stays easy to reason about.
  double normal() {
    const double u1 = u01_open_low();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  void normal2(double& a, double& b) {
    const double u1 = u01_open_low();
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    a = r * std::cos(6.283185307179586476925287 * u2);
    b = r * std::sin(6.283185307179586476925287 * u2);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Keyed pseudo-random permutation of [0, n) (4-round Feistel with cycle
// walking). Used to pair position strata with velocity strata without
// correlating the two axes.
class IndexPermutation {
 public:
  IndexPermutation(std::uint64_t n, std::uint64_t seed);

  std::uint64_t size() const { return n_; }
  std::uint64_t operator()(std::uint64_t i) const;

 private:
  std::uint64_t encrypt_once(std::uint64_t x) const;

  std::uint64_t n_ = 1;
  int half_bits_ = 1;
  std::uint64_t half_mask_ = 1;
  std::uint64_t keys_[4] = {0, 0, 0, 0};
};

// Inverse CDF of the standard normal (Acklam's rational approximation
// polished with one Halley step against std::erfc).
double inv_std_normal_cdf(double p);

double std_normal_cdf(double x);
double std_normal_pdf(double x);

// Quantile of a standard normal conditioned on [lo, hi].
double truncated_normal_quantile(double p, double lo, double hi);

}  // namespace hpic
