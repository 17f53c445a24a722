#pragma once

// Test-only reference computations, independent of the library's assembly
// and solve paths: dense quadrature assembly, brute-force sums, one-sample
// KS statistics, and slope fits for convergence studies.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hpic/fem.hpp"
#include "hpic/particles.hpp"

namespace oracle {

// Dense stiffness matrix by brute-force composite quadrature of
// grad W_i . grad W_j with basis values obtained from finite differences of
// eval_potential_at on unit vectors; independent of assemble_stiffness.
inline std::vector<std::vector<double>> dense_stiffness_1d(const hpic::FemSpace& space,
                                                           int subdivisions = 200) {
  const int n = space.n_dofs;
  std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  const double L = space.hi[0] - space.lo[0];
  const long total = static_cast<long>(space.cells[0]) * subdivisions;
  const double hq = L / static_cast<double>(total);
  // midpoint rule on a fine mesh applied to the piecewise-smooth gradients;
  // gradients sampled by central differences of the basis interpolant
  std::vector<std::vector<double>> grads(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    e.assign(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    auto& g = grads[static_cast<std::size_t>(j)];
    g.resize(static_cast<std::size_t>(total));
    for (long q = 0; q < total; ++q) {
      const double x = space.lo[0] + (q + 0.5) * hq;
      const double d = 1e-7 * L;
      const double up = hpic::eval_potential_at(space, e, {x + d, 0.0});
      const double dn = hpic::eval_potential_at(space, e, {x - d, 0.0});
      g[static_cast<std::size_t>(q)] = (up - dn) / (2.0 * d);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double acc = 0.0;
      for (long q = 0; q < total; ++q) {
        acc += grads[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)] *
               grads[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)];
      }
      M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc * hq;
      M[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = acc * hq;
    }
  }
  return M;
}

// Kernel-basis overlap by composite Simpson on a fine grid; independent of
// the pieced Gauss integration in the library.
inline double overlap_simpson(const std::function<double(double)>& f, double a, double b,
                              int n = 40000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// One-sample Kolmogorov-Smirnov statistic against a CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

// Least-squares slope of log(err) vs log(h).
inline double fit_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Minimal-image difference on a periodic axis.
inline double periodic_diff(double a, double b, double L) {
  double d = a - b;
  d -= L * std::round(d / L);
  return d;
}

inline double rms(const std::vector<double>& v) {
  double acc = 0.0;
  for (const double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace oracle
