#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hpic/particles.hpp"
#include "hpic/sparse.hpp"

namespace hpic {

// sqrt(phi^T M phi); the square root of twice the field energy.
double electric_energy(const std::vector<double>& phi, const SparseMatrix& M);

// H = 1/2 sum_s w_s |V_s|^2 + 1/2 phi^T M phi.
double total_energy(const ParticleEnsemble& e, const std::vector<double>& phi,
                    const SparseMatrix& M);

struct DampingFitOptions {
  double t_min = 1.0;   // discard the initial transient
  int max_peaks = 8;
  // Strict local maxima closer than this are one oscillation peak: the
  // largest of the cluster wins. Keeps sampling wobble from registering as
  // peaks while resolving mode periods longer than twice this.
  double min_peak_separation = 1.0;
  // With fewer than 4 peaks: fit log E directly over t >= t_min instead of
  // throwing InsufficientPeaks.
  bool direct_fallback = false;
};

struct DampingFit {
  double gamma = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int peaks_used = 0;
  std::vector<double> peak_t;
  std::vector<double> peak_value;
};

// Least-squares line through (t_peak, log E_peak) of the strict local
// maxima of the series; gamma = -slope.
DampingFit fit_damping_rate(std::span<const double> t, std::span<const double> ed,
                            const DampingFitOptions& opts = {});

struct GridSpec {
  int nx = 256;
  int ny = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
};

struct DensityGrid {
  GridSpec spec;
  double time = 0.0;
  std::vector<double> rho;  // nx*ny values, x fastest, weight per cell area
};

DensityGrid density_grid(const ParticleEnsemble& e, const GridSpec& spec,
                         double time = 0.0);

// Azimuthal Fourier analysis about the origin. Coefficient
// c_l = sum_s w_s exp(-i l theta_s); amplitude(l>=1) = 2|c_l| / c_0.
std::complex<double> mode_coefficient(const ParticleEnsemble& e, int l);
// All coefficients l = 0..lmax in one pass (deterministic reduction).
std::vector<std::complex<double>> mode_coefficients(const ParticleEnsemble& e, int lmax);
double mode_amplitude(const ParticleEnsemble& e, int l);
double mode_amplitude(const DensityGrid& grid, int l);

struct DiagnosticsRecord {
  // metadata
  std::string scenario;
  std::string scheme;
  double dt = 0.0;
  std::uint64_t np = 0;
  int n_cells = 0;
  std::uint64_t seed = 0;

  std::vector<double> t, ed, energy, px, py, charge;

  void append(double time, double ed_v, double h_v, double px_v, double py_v,
              double c_v) {
    t.push_back(time);
    ed.push_back(ed_v);
    energy.push_back(h_v);
    px.push_back(px_v);
    py.push_back(py_v);
    charge.push_back(c_v);
  }
  std::size_t rows() const { return t.size(); }
};

}  // namespace hpic
