#include "hpic/particles.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hpic/errors.hpp"
#include "hpic/quadrature.hpp"
#include "hpic/reduce.hpp"

namespace hpic {

double bspline_value(int degree, double u) {
  const double a = std::abs(u);
  switch (degree) {
    case 0:
      return a < 0.5 ? 1.0 : 0.0;
    case 1:
      return a <= 1.0 ? 1.0 - a : 0.0;
    case 2:
      if (a <= 0.5) return 0.75 - a * a;
      if (a <= 1.5) {
        const double t = 1.5 - a;
        return 0.5 * t * t;
      }
      return 0.0;
    case 3:
      if (a <= 1.0) return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
      if (a <= 2.0) {
        const double t = 2.0 - a;
        return t * t * t / 6.0;
      }
      return 0.0;
    default:
      throw std::invalid_argument("bspline_value: degree must be 0..3");
  }
}

namespace detail {

// Overlap integrals (S_eps(.-x), W_node) along one axis, integrated exactly:
// the support is cut at cell boundaries and kernel knots and each piece gets
// a Gauss rule matching the polynomial degree of the product.
int kernel_axis_overlap(const FemSpace& space, int axis, double x, int degree,
                        double eps, int* dofs, double* coeffs, int cap) {
  const int p = space.order;
  const double h = space.h[axis];
  const double half = 0.5 * (degree + 1) * eps;
  const GaussRule& gq = gauss_rule((degree + p) / 2 + 1);

  int count = 0;
  auto add = [&](int dof, double v) {
    for (int i = 0; i < count; ++i) {
      if (dofs[i] == dof) {
        coeffs[i] += v;
        return;
      }
    }
    if (count >= cap) throw std::invalid_argument("kernel_axis_overlap: kernel too wide");
    dofs[count] = dof;
    coeffs[count] = v;
    ++count;
  };

  const int c_lo = static_cast<int>(std::floor((x - half - space.lo[axis]) / h));
  const int c_hi = static_cast<int>(std::floor((x + half - space.lo[axis]) / h));
  for (int c = c_lo; c <= c_hi; ++c) {
    if (!space.periodic() && (c < 0 || c >= space.cells[axis])) continue;
    const double cell_lo = space.lo[axis] + c * h;
    double a = std::max(cell_lo, x - half);
    const double b = std::min(cell_lo + h, x + half);
    if (b <= a) continue;
    // knots of S_eps inside (a, b)
    double cuts[8];
    int ncuts = 0;
    for (int m = 1; m <= degree; ++m) {
      const double knot = x - half + m * eps;
      if (knot > a && knot < b) cuts[ncuts++] = knot;
    }
    cuts[ncuts] = b;
    for (int seg = 0; seg <= ncuts; ++seg) {
      const double s0 = a;
      const double s1 = cuts[seg];
      const double len = s1 - s0;
      for (std::size_t q = 0; q < gq.x.size(); ++q) {
        const double t = s0 + gq.x[q] * len;
        const double sval = bspline_value(degree, (t - x) / eps) / eps;
        const double xi = (t - cell_lo) / h;
        double nx[3];
        if (p == 1) {
          nx[0] = 1.0 - xi;
          nx[1] = xi;
        } else {
          nx[0] = (1.0 - xi) * (1.0 - 2.0 * xi);
          nx[1] = 4.0 * xi * (1.0 - xi);
          nx[2] = xi * (2.0 * xi - 1.0);
        }
        for (int l = 0; l <= p; ++l) {
          const int dof = axis_dof_index(space, axis, c * p + l);
          if (dof < 0) continue;
          add(dof, gq.w[q] * len * sval * nx[l]);
        }
      }
      a = s1;
    }
  }
  return count;
}

}  // namespace detail

namespace {

struct OverlapBuffers {
  int dofs_x[64], dofs_y[64];
  double coef_x[64], coef_y[64];
};

// Accumulates one marker into buf; returns false if the marker is outside a
// Dirichlet domain.
inline bool deposit_one(const ParticleEnsemble& e, const SmoothingKernel& kernel,
                        const FemSpace& space, std::size_t s, double* buf,
                        OverlapBuffers& ob) {
  std::array<double, 2> pos{e.x[0][s], space.dim == 2 ? e.x[1][s] : 0.0};
  for (int a = 0; a < space.dim; ++a) {
    if (space.periodic()) {
      pos[a] = wrap_coord(space, a, pos[a]);
    } else if (pos[a] < space.lo[a] || pos[a] > space.hi[a]) {
      return false;
    }
  }
  const double w = e.w[s];
  if (kernel.shape == KernelShape::Delta) {
    const AxisBasis bx = axis_basis(space, 0, pos[0]);
    if (space.dim == 1) {
      for (int l = 0; l < bx.count; ++l) {
        if (bx.dof[l] >= 0) buf[bx.dof[l]] += w * bx.value[l];
      }
    } else {
      const AxisBasis by = axis_basis(space, 1, pos[1]);
      for (int ly = 0; ly < by.count; ++ly) {
        if (by.dof[ly] < 0) continue;
        const std::size_t row = static_cast<std::size_t>(by.dof[ly]) * space.axis_dofs[0];
        for (int lx = 0; lx < bx.count; ++lx) {
          if (bx.dof[lx] >= 0) buf[row + bx.dof[lx]] += w * by.value[ly] * bx.value[lx];
        }
      }
    }
  } else {
    const int nx = detail::kernel_axis_overlap(space, 0, pos[0], kernel.degree,
                                               kernel.width, ob.dofs_x, ob.coef_x, 64);
    if (space.dim == 1) {
      for (int i = 0; i < nx; ++i) buf[ob.dofs_x[i]] += w * ob.coef_x[i];
    } else {
      const int ny = detail::kernel_axis_overlap(space, 1, pos[1], kernel.degree,
                                                 kernel.width, ob.dofs_y, ob.coef_y, 64);
      for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(ob.dofs_y[j]) * space.axis_dofs[0];
        for (int i = 0; i < nx; ++i) buf[row + ob.dofs_x[i]] += w * ob.coef_y[j] * ob.coef_x[i];
      }
    }
  }
  return true;
}

void validate_kernel(const SmoothingKernel& kernel, const FemSpace& space) {
  if (kernel.shape == KernelShape::Delta) return;
  if (kernel.degree < 0 || kernel.degree > 3) {
    throw std::invalid_argument("deposit: B-spline degree must be 0..3");
  }
  if (!(kernel.width > 0.0)) throw std::invalid_argument("deposit: kernel width must be > 0");
  for (int a = 0; a < space.dim; ++a) {
    if ((kernel.degree + 1) * kernel.width > space.length(a)) {
      throw std::invalid_argument("deposit: kernel support exceeds domain size");
    }
  }
}

}  // namespace

LoadVector deposit(const ParticleEnsemble& e, const SmoothingKernel& kernel,
                   const FemSpace& space, double rho0, const DepositOptions& opts,
                   DepositWorkspace* ws) {
  validate_kernel(kernel, space);
  if (rho0 < 0.0) throw std::invalid_argument("deposit: rho0 must be >= 0");
  const std::size_t np = e.size();
  const int n = space.n_dofs;

  int nb = 1;
#ifdef _OPENMP
  nb = opts.deterministic ? opts.buckets : omp_get_max_threads();
#else
  nb = opts.deterministic ? opts.buckets : 1;
#endif
  if (nb < 1) nb = 1;
  // Small ensembles: one bucket per 512 markers is plenty. The count depends
  // only on (opts, np), never on the thread count.
  while (nb > 1 && np < static_cast<std::size_t>(nb) * 512) nb /= 2;

  DepositWorkspace local;
  DepositWorkspace& w = ws ? *ws : local;
  w.partial.resize(static_cast<std::size_t>(nb) * n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(w.partial.size()); ++i) {
    w.partial[static_cast<std::size_t>(i)] = 0.0;
  }

  std::atomic<bool> out_of_domain{false};
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < nb; ++b) {
    OverlapBuffers ob;
    double* buf = w.partial.data() + static_cast<std::size_t>(b) * n;
    const std::size_t begin = np * static_cast<std::size_t>(b) / nb;
    const std::size_t end = np * (static_cast<std::size_t>(b) + 1) / nb;
    for (std::size_t s = begin; s < end; ++s) {
      if (!deposit_one(e, kernel, space, s, buf, ob)) {
        out_of_domain.store(true, std::memory_order_relaxed);
      }
    }
  }
  if (out_of_domain.load() && opts.policy == OutOfDomainPolicy::Error) {
    throw ParticleOutOfDomain("deposit: marker outside Dirichlet domain");
  }

  LoadVector F(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int b = 0; b < nb; ++b) s += w.partial[static_cast<std::size_t>(b) * n + i];
    F[static_cast<std::size_t>(i)] = s - rho0 * space.w_integral[static_cast<std::size_t>(i)];
  }
  return F;
}

double total_charge(const ParticleEnsemble& e) { return det_sum(e.w); }

std::array<double, 3> total_momentum(const ParticleEnsemble& e) {
  std::array<double, 3> p{};
  for (int c = 0; c < 3; ++c) {
    p[c] = det_sum(e.size(), [&](std::size_t s) { return e.w[s] * e.v[c][s]; });
  }
  return p;
}

double kinetic_energy(const ParticleEnsemble& e) {
  return det_sum(e.size(), [&](std::size_t s) {
    return 0.5 * e.w[s] *
           (e.v[0][s] * e.v[0][s] + e.v[1][s] * e.v[1][s] + e.v[2][s] * e.v[2][s]);
  });
}

void wrap_positions(ParticleEnsemble& e, const FemSpace& space) {
  if (!space.periodic()) return;
  for (int a = 0; a < space.dim; ++a) {
    auto& xs = e.x[a];
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(xs.size()); ++s) {
      xs[static_cast<std::size_t>(s)] = wrap_coord(space, a, xs[static_cast<std::size_t>(s)]);
    }
  }
}

}  // namespace hpic
