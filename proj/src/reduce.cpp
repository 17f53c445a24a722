#include "hpic/reduce.hpp"

namespace hpic {

namespace detail {

double combine_pairwise(std::vector<double>& partial) {
  const std::size_t nb = partial.size();
  for (std::size_t stride = 1; stride < nb; stride *= 2) {
    for (std::size_t i = 0; i + stride < nb; i += 2 * stride) {
      partial[i] += partial[i + stride];
    }
  }
  return partial.empty() ? 0.0 : partial[0];
}

}  // namespace detail

double det_sum(std::span<const double> v) {
  return det_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

double det_dot(std::span<const double> a, std::span<const double> b) {
  return det_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

}  // namespace hpic
