#include "hpic/rng.hpp"

#include <cassert>
#include <stdexcept>

namespace hpic {

IndexPermutation::IndexPermutation(std::uint64_t n, std::uint64_t seed) : n_(n ? n : 1) {
  int bits = 2;
  while ((1ULL << bits) < n_) bits += 2;
  half_bits_ = bits / 2;
  half_mask_ = (1ULL << half_bits_) - 1;
  Rng r(seed, 0xfee57e1u);
  for (auto& k : keys_) k = r.next_u64();
}

std::uint64_t IndexPermutation::encrypt_once(std::uint64_t x) const {
  std::uint64_t left = x >> half_bits_;
  std::uint64_t right = x & half_mask_;
  for (const std::uint64_t key : keys_) {
    const std::uint64_t f = Rng::mix(right ^ key) & half_mask_;
    const std::uint64_t new_left = right;
    right = left ^ f;
    left = new_left;
  }
  return (left << half_bits_) | right;
}

std::uint64_t IndexPermutation::operator()(std::uint64_t i) const {
  assert(i < n_);
  std::uint64_t x = i;
  // Cycle walking: re-encrypt until the value lands back in [0, n).
  do {
    x = encrypt_once(x);
  } while (x >= n_);
  return x;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double std_normal_pdf(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

double inv_std_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inv_std_normal_cdf: p outside (0,1)");

  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against the exact CDF brings the error to ~1e-15.
  const double e = std_normal_cdf(x) - p;
  const double u = e * 2.506628274631000502416 * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double truncated_normal_quantile(double p, double lo, double hi) {
  const double flo = std_normal_cdf(lo);
  const double fhi = std_normal_cdf(hi);
  double q = flo + p * (fhi - flo);
  if (q <= 0.0) q = 5e-17;
  if (q >= 1.0) q = 1.0 - 5e-17;
  double x = inv_std_normal_cdf(q);
  if (x < lo) x = lo;
  if (x > hi) x = hi;
  return x;
}

}  // namespace hpic
