#pragma once

#include <vector>

namespace hpic {

// Gauss-Legendre rule mapped to [0, 1]; n points integrate polynomials of
// degree <= 2n-1 exactly.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GaussRule& gauss_rule(int npoints);

}  // namespace hpic
