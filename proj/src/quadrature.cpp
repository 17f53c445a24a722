#include "hpic/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hpic {

namespace {

constexpr int kMaxRule = 64;

GaussRule make_rule(int n) {
  // Newton on the Legendre polynomial, standard three-term recurrence.
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // Map from [-1, 1] to [0, 1].
    rule.x[i] = 0.5 * (1.0 - x);  // roots come out descending; reversed here
    rule.w[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_rule(int npoints) {
  static const auto* rules = [] {
    auto* r = new std::vector<GaussRule>;
    r->reserve(kMaxRule);
    for (int n = 1; n <= kMaxRule; ++n) r->push_back(make_rule(n));
    return r;
  }();
  if (npoints < 1 || npoints > kMaxRule) throw std::out_of_range("gauss_rule: npoints");
  return (*rules)[static_cast<std::size_t>(npoints - 1)];
}

}  // namespace hpic
