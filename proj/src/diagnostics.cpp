#include "hpic/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hpic/errors.hpp"
#include "hpic/reduce.hpp"

namespace hpic {

double electric_energy(const std::vector<double>& phi, const SparseMatrix& M) {
  if (static_cast<int>(phi.size()) != M.size()) {
    throw std::invalid_argument("electric_energy: size mismatch");
  }
  const std::vector<double> q = M.multiply(phi);
  double val = det_dot(phi, q);
  if (val < 0.0) {
    if (val < -1e-12) throw std::logic_error("electric_energy: phi^T M phi < -1e-12");
    val = 0.0;
  }
  return std::sqrt(val);
}

double total_energy(const ParticleEnsemble& e, const std::vector<double>& phi,
                    const SparseMatrix& M) {
  const double ed = electric_energy(phi, M);
  return kinetic_energy(e) + 0.5 * ed * ed;
}

DampingFit fit_damping_rate(std::span<const double> t, std::span<const double> ed,
                            const DampingFitOptions& opts) {
  if (t.size() != ed.size()) throw std::invalid_argument("fit_damping_rate: size mismatch");
  DampingFit fit;
  // strict local maxima, clustered by the minimum separation
  double cluster_t = -1.0, cluster_v = 0.0;
  auto flush = [&] {
    if (cluster_t >= 0.0 && static_cast<int>(fit.peak_t.size()) < opts.max_peaks) {
      fit.peak_t.push_back(cluster_t);
      fit.peak_value.push_back(cluster_v);
    }
    cluster_t = -1.0;
  };
  for (std::size_t i = 1; i + 1 < ed.size(); ++i) {
    if (t[i] < opts.t_min) continue;
    if (!(ed[i] > ed[i - 1] && ed[i] > ed[i + 1] && ed[i] > 0.0)) continue;
    if (cluster_t >= 0.0 && t[i] - cluster_t >= opts.min_peak_separation) flush();
    if (cluster_t < 0.0 || ed[i] > cluster_v) {
      cluster_t = t[i];
      cluster_v = ed[i];
    }
    if (static_cast<int>(fit.peak_t.size()) >= opts.max_peaks) break;
  }
  flush();

  std::vector<double> xs, ys;
  if (static_cast<int>(fit.peak_t.size()) >= 4) {
    xs = fit.peak_t;
    ys = fit.peak_value;
  } else if (opts.direct_fallback) {
    for (std::size_t i = 0; i < ed.size(); ++i) {
      if (t[i] >= opts.t_min && ed[i] > 0.0) {
        xs.push_back(t[i]);
        ys.push_back(ed[i]);
      }
    }
    if (xs.size() < 2) throw InsufficientPeaks("fit_damping_rate: series too short");
  } else {
    throw InsufficientPeaks("fit_damping_rate: fewer than 4 peaks past t_min");
  }

  for (auto& y : ys) y = std::log(y);
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / det;
  const double icept = (sy - slope * sx) / n;

  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (icept + slope * xs[i]);
    ss_res += r * r;
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.gamma = -slope;
  fit.intercept = icept;
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.peaks_used = static_cast<int>(n);
  return fit;
}

DensityGrid density_grid(const ParticleEnsemble& e, const GridSpec& spec, double time) {
  DensityGrid g;
  g.spec = spec;
  g.time = time;
  g.rho.assign(static_cast<std::size_t>(spec.nx) * spec.ny, 0.0);
  const double hx = (spec.hi[0] - spec.lo[0]) / spec.nx;
  const double hy = spec.ny > 1 ? (spec.hi[1] - spec.lo[1]) / spec.ny : 1.0;
  const double inv_area = 1.0 / (hx * hy);
  for (std::size_t s = 0; s < e.size(); ++s) {
    const int ix = static_cast<int>(std::floor((e.x[0][s] - spec.lo[0]) / hx));
    if (ix < 0 || ix >= spec.nx) continue;
    int iy = 0;
    if (spec.ny > 1) {
      iy = static_cast<int>(std::floor((e.x[1][s] - spec.lo[1]) / hy));
      if (iy < 0 || iy >= spec.ny) continue;
    }
    g.rho[static_cast<std::size_t>(iy) * spec.nx + ix] += e.w[s] * inv_area;
  }
  return g;
}

std::vector<std::complex<double>> mode_coefficients(const ParticleEnsemble& e, int lmax) {
  // Blocked deterministic reduction over 2*(lmax+1) accumulators.
  const std::size_t n = e.size();
  const int nacc = 2 * (lmax + 1);
  const std::size_t nb = n == 0 ? 1 : (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nb * static_cast<std::size_t>(nacc), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) {
    double* acc = partial.data() + static_cast<std::size_t>(b) * nacc;
    const std::size_t begin = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t end = std::min(begin + kReduceBlock, n);
    for (std::size_t s = begin; s < end; ++s) {
      const double theta = std::atan2(e.x[1][s], e.x[0][s]);
      const double c = std::cos(theta), si = std::sin(theta);
      // e^{-i l theta} built up by complex multiplication
      double re = 1.0, im = 0.0;
      const double w = e.w[s];
      acc[0] += w;
      for (int l = 1; l <= lmax; ++l) {
        const double nre = re * c + im * si;   // re(e^{-i l th})
        const double nim = im * c - re * si;   // im
        re = nre;
        im = nim;
        acc[2 * l] += w * re;
        acc[2 * l + 1] += w * im;
      }
    }
  }
  // pairwise tree over blocks, component-wise
  for (std::size_t stride = 1; stride < nb; stride *= 2) {
    for (std::size_t i = 0; i + stride < nb; i += 2 * stride) {
      double* a = partial.data() + i * nacc;
      const double* b = partial.data() + (i + stride) * nacc;
      for (int c = 0; c < nacc; ++c) a[c] += b[c];
    }
  }
  std::vector<std::complex<double>> out(static_cast<std::size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) {
    out[static_cast<std::size_t>(l)] = {partial[2 * static_cast<std::size_t>(l)],
                                        partial[2 * static_cast<std::size_t>(l) + 1]};
  }
  return out;
}

std::complex<double> mode_coefficient(const ParticleEnsemble& e, int l) {
  return mode_coefficients(e, l)[static_cast<std::size_t>(l)];
}

double mode_amplitude(const ParticleEnsemble& e, int l) {
  const auto c = mode_coefficients(e, l);
  const double c0 = c[0].real();
  if (l == 0) return c0;
  return c0 != 0.0 ? 2.0 * std::abs(c[static_cast<std::size_t>(l)]) / c0 : 0.0;
}

double mode_amplitude(const DensityGrid& grid, int l) {
  const double hx = (grid.spec.hi[0] - grid.spec.lo[0]) / grid.spec.nx;
  const double hy = grid.spec.ny > 1 ? (grid.spec.hi[1] - grid.spec.lo[1]) / grid.spec.ny : 1.0;
  double c0 = 0.0, re = 0.0, im = 0.0;
  for (int iy = 0; iy < grid.spec.ny; ++iy) {
    const double y = grid.spec.lo[1] + (iy + 0.5) * hy;
    for (int ix = 0; ix < grid.spec.nx; ++ix) {
      const double x = grid.spec.lo[0] + (ix + 0.5) * hx;
      const double m = grid.rho[static_cast<std::size_t>(iy) * grid.spec.nx + ix] * hx * hy;
      const double theta = std::atan2(y, x);
      c0 += m;
      re += m * std::cos(l * theta);
      im -= m * std::sin(l * theta);
    }
  }
  if (l == 0) return c0;
  return c0 != 0.0 ? 2.0 * std::hypot(re, im) / c0 : 0.0;
}

}  // namespace hpic
