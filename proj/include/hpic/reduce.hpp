#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace hpic {

// Deterministic reductions: fixed-size blocks are summed with Neumaier
// compensation (leaves run in parallel), then a serial pairwise tree
// combines the block sums. The result is bit-identical for any thread
// count because neither block boundaries nor combine order depend on it.
inline constexpr std::size_t kReduceBlock = 4096;

namespace detail {
double combine_pairwise(std::vector<double>& partial);

inline void neumaier_add(double x, double& s, double& c) {
  const double t = s + x;
  if (std::abs(s) >= std::abs(x)) {
    c += (s - t) + x;
  } else {
    c += (x - t) + s;
  }
  s = t;
}
}  // namespace detail

template <class Term>
double det_sum(std::size_t n, Term&& term) {
  if (n == 0) return 0.0;
  const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nb);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t end = begin + kReduceBlock < n ? begin + kReduceBlock : n;
    double s = 0.0, c = 0.0;
    for (std::size_t i = begin; i < end; ++i) detail::neumaier_add(term(i), s, c);
    partial[static_cast<std::size_t>(b)] = s + c;
  }
  return detail::combine_pairwise(partial);
}

double det_sum(std::span<const double> v);
double det_dot(std::span<const double> a, std::span<const double> b);

}  // namespace hpic
