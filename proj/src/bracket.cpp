#include "hpic/bracket.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace hpic {

DenseMatrix hat_matrix(const std::array<double, 3>& B) {
  DenseMatrix H(3, 3);
  H(0, 1) = B[2];
  H(0, 2) = -B[1];
  H(1, 0) = -B[2];
  H(1, 2) = B[0];
  H(2, 0) = B[1];
  H(2, 1) = -B[0];
  return H;
}

namespace {

inline std::array<double, 3> position_of(const ParticleEnsemble& e, std::size_t s) {
  return {e.x[0][s], e.x[1][s], e.x[2][s]};
}

}  // namespace

DenseMatrix build_poisson_matrix(const ParticleEnsemble& e, const FieldFn& b0) {
  const int np = static_cast<int>(e.size());
  const int n3 = 3 * np;
  DenseMatrix K(6 * np, 6 * np);
  for (int s = 0; s < np; ++s) {
    const double inv_w = 1.0 / e.w[static_cast<std::size_t>(s)];
    for (int c = 0; c < 3; ++c) {
      K(3 * s + c, n3 + 3 * s + c) = inv_w;
      K(n3 + 3 * s + c, 3 * s + c) = -inv_w;
    }
    const DenseMatrix H = hat_matrix(b0(position_of(e, static_cast<std::size_t>(s))));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        K(n3 + 3 * s + i, n3 + 3 * s + j) = inv_w * H(i, j);
      }
    }
  }
  return K;
}

double discrete_bracket(std::span<const double> grad_f, std::span<const double> grad_g,
                        const DenseMatrix& K) {
  if (static_cast<int>(grad_f.size()) != K.rows || static_cast<int>(grad_g.size()) != K.cols) {
    throw std::invalid_argument("discrete_bracket: gradient length != 6 Np");
  }
  double acc = 0.0;
  for (int i = 0; i < K.rows; ++i) {
    if (grad_f[static_cast<std::size_t>(i)] == 0.0) continue;
    double row = 0.0;
    for (int j = 0; j < K.cols; ++j) row += K(i, j) * grad_g[static_cast<std::size_t>(j)];
    acc += grad_f[static_cast<std::size_t>(i)] * row;
  }
  return acc;
}

namespace {

// K entries only depend on X through the same-particle velocity-velocity
// block, so entry-wise finite differences stay cheap.
double entry(const ParticleEnsemble& e, const FieldFn& b0, int i, int j) {
  const int n3 = 3 * static_cast<int>(e.size());
  const bool iv = i >= n3, jv = j >= n3;
  if (!iv && !jv) return 0.0;
  if (!iv && jv) {
    return (j - n3 == i) ? 1.0 / e.w[static_cast<std::size_t>(i / 3)] : 0.0;
  }
  if (iv && !jv) {
    return (i - n3 == j) ? -1.0 / e.w[static_cast<std::size_t>(j / 3)] : 0.0;
  }
  const int s = (i - n3) / 3, t = (j - n3) / 3;
  if (s != t) return 0.0;
  const DenseMatrix H = hat_matrix(b0(position_of(e, static_cast<std::size_t>(s))));
  return H((i - n3) % 3, (j - n3) % 3) / e.w[static_cast<std::size_t>(s)];
}

// dK_ij/dZ_l by central differences (zero unless l is a position index).
double entry_derivative(ParticleEnsemble& e, const FieldFn& b0, int i, int j, int l,
                        const JacobiOptions& opts) {
  const int n3 = 3 * static_cast<int>(e.size());
  if (l >= n3) return 0.0;
  const std::size_t s = static_cast<std::size_t>(l / 3);
  const int c = l % 3;
  double& coord = e.x[static_cast<std::size_t>(c)][s];
  const double saved = coord;
  const double delta = opts.delta_scale * std::max(1.0, std::abs(saved));

  auto central = [&](double d) {
    coord = saved + d;
    const double up = entry(e, b0, i, j);
    coord = saved - d;
    const double dn = entry(e, b0, i, j);
    coord = saved;
    return (up - dn) / (2.0 * d);
  };

  double der = central(delta);
  if (opts.richardson) {
    const double half = central(0.5 * delta);
    der = (4.0 * half - der) / 3.0;
  }
  return der;
}

}  // namespace

double jacobi_residual(const ParticleEnsemble& e, const FieldFn& b0, int i, int j,
                       int k, const JacobiOptions& opts) {
  const int dim = 6 * static_cast<int>(e.size());
  if (i < 0 || j < 0 || k < 0 || i >= dim || j >= dim || k >= dim) {
    throw std::out_of_range("jacobi_residual: index outside [0, 6 Np)");
  }
  ParticleEnsemble scratch = e;
  double acc = 0.0;
  for (int l = 0; l < 3 * static_cast<int>(e.size()); ++l) {
    const double dij = entry_derivative(scratch, b0, i, j, l, opts);
    const double djk = entry_derivative(scratch, b0, j, k, l, opts);
    const double dki = entry_derivative(scratch, b0, k, i, l, opts);
    if (dij != 0.0) acc += dij * entry(e, b0, l, k);
    if (djk != 0.0) acc += djk * entry(e, b0, l, i);
    if (dki != 0.0) acc += dki * entry(e, b0, l, j);
  }
  return acc;
}

namespace {

struct ScanData {
  DenseMatrix K;
  std::vector<DenseMatrix> dK;  // one per position coordinate
};

ScanData scan_data(const ParticleEnsemble& e, const FieldFn& b0, const JacobiOptions& opts) {
  ScanData sd;
  sd.K = build_poisson_matrix(e, b0);
  const int n3 = 3 * static_cast<int>(e.size());
  ParticleEnsemble scratch = e;
  sd.dK.reserve(static_cast<std::size_t>(n3));
  for (int l = 0; l < n3; ++l) {
    const std::size_t s = static_cast<std::size_t>(l / 3);
    double& coord = scratch.x[static_cast<std::size_t>(l % 3)][s];
    const double saved = coord;
    const double delta = opts.delta_scale * std::max(1.0, std::abs(saved));
    auto diff = [&](double d) {
      coord = saved + d;
      DenseMatrix up = build_poisson_matrix(scratch, b0);
      coord = saved - d;
      const DenseMatrix dn = build_poisson_matrix(scratch, b0);
      coord = saved;
      for (std::size_t m = 0; m < up.a.size(); ++m) up.a[m] = (up.a[m] - dn.a[m]) / (2.0 * d);
      return up;
    };
    DenseMatrix der = diff(delta);
    if (opts.richardson) {
      const DenseMatrix half = diff(0.5 * delta);
      for (std::size_t m = 0; m < der.a.size(); ++m) {
        der.a[m] = (4.0 * half.a[m] - der.a[m]) / 3.0;
      }
    }
    sd.dK.push_back(std::move(der));
  }
  return sd;
}

double scan_residual(const ScanData& sd, int n3, int i, int j, int k) {
  double acc = 0.0;
  for (int l = 0; l < n3; ++l) {
    acc += sd.dK[static_cast<std::size_t>(l)](i, j) * sd.K(l, k) +
           sd.dK[static_cast<std::size_t>(l)](j, k) * sd.K(l, i) +
           sd.dK[static_cast<std::size_t>(l)](k, i) * sd.K(l, j);
  }
  return acc;
}

// The only triples with a divergence-driven value: three distinct velocity
// components of one particle.
bool is_velocity_triple(int n3, int i, int j, int k) {
  if (i < n3 || j < n3 || k < n3) return false;
  if ((i - n3) / 3 != (j - n3) / 3 || (j - n3) / 3 != (k - n3) / 3) return false;
  const int a = (i - n3) % 3, b = (j - n3) % 3, c = (k - n3) % 3;
  return a != b && b != c && a != c;
}

}  // namespace

JacobiScan jacobi_scan(const ParticleEnsemble& e, const FieldFn& b0,
                       const JacobiOptions& opts) {
  const int np = static_cast<int>(e.size());
  const int n3 = 3 * np;
  const int dim = 6 * np;
  const ScanData sd = scan_data(e, b0, opts);

  JacobiScan out;
  out.velocity_triple_residual.assign(static_cast<std::size_t>(np), 0.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < dim; ++k) {
        const double r = scan_residual(sd, n3, i, j, k);
        ++out.triples;
        if (is_velocity_triple(n3, i, j, k)) {
          const std::size_t s = static_cast<std::size_t>((i - n3) / 3);
          if (std::abs(r) > std::abs(out.velocity_triple_residual[s])) {
            out.velocity_triple_residual[s] = r;
          }
        } else if (std::abs(r) > out.max_zero_expected) {
          out.max_zero_expected = std::abs(r);
        }
      }
    }
  }
  return out;
}

void write_jacobi_report(std::ostream& os, const ParticleEnsemble& e,
                         const FieldFn& b0, const JacobiOptions& opts) {
  const int np = static_cast<int>(e.size());
  const int n3 = 3 * np;
  const int dim = 6 * np;
  const ScanData sd = scan_data(e, b0, opts);
  os << "# i j k residual class\n";
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < dim; ++k) {
        const double r = scan_residual(sd, n3, i, j, k);
        os << i << ' ' << j << ' ' << k << ' ' << r << ' '
           << (is_velocity_triple(n3, i, j, k) ? "div-driven" : "zero-expected") << '\n';
      }
    }
  }
}

}  // namespace hpic
