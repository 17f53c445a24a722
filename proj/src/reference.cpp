#include "hpic/reference.hpp"

#include <cmath>

#include "hpic/errors.hpp"

namespace hpic::ref {

LoadVector deposit(const ParticleEnsemble& e, const SmoothingKernel& kernel,
                   const FemSpace& space, double rho0, OutOfDomainPolicy policy) {
  LoadVector F(static_cast<std::size_t>(space.n_dofs), 0.0);
  int dofs_x[64], dofs_y[64];
  double coef_x[64], coef_y[64];
  bool outside = false;

  for (std::size_t s = 0; s < e.size(); ++s) {
    std::array<double, 2> pos{e.x[0][s], space.dim == 2 ? e.x[1][s] : 0.0};
    bool out = false;
    for (int a = 0; a < space.dim; ++a) {
      if (space.periodic()) {
        pos[a] = wrap_coord(space, a, pos[a]);
      } else if (pos[a] < space.lo[a] || pos[a] > space.hi[a]) {
        out = true;
      }
    }
    if (out) {
      outside = true;
      continue;
    }
    const double w = e.w[s];
    if (kernel.shape == KernelShape::Delta) {
      const AxisBasis bx = axis_basis(space, 0, pos[0]);
      if (space.dim == 1) {
        for (int l = 0; l < bx.count; ++l) {
          if (bx.dof[l] >= 0) F[static_cast<std::size_t>(bx.dof[l])] += w * bx.value[l];
        }
      } else {
        const AxisBasis by = axis_basis(space, 1, pos[1]);
        for (int ly = 0; ly < by.count; ++ly) {
          if (by.dof[ly] < 0) continue;
          const std::size_t row = static_cast<std::size_t>(by.dof[ly]) * space.axis_dofs[0];
          for (int lx = 0; lx < bx.count; ++lx) {
            if (bx.dof[lx] >= 0) F[row + bx.dof[lx]] += w * by.value[ly] * bx.value[lx];
          }
        }
      }
    } else {
      const int nx = detail::kernel_axis_overlap(space, 0, pos[0], kernel.degree,
                                                 kernel.width, dofs_x, coef_x, 64);
      if (space.dim == 1) {
        for (int i = 0; i < nx; ++i) F[static_cast<std::size_t>(dofs_x[i])] += w * coef_x[i];
      } else {
        const int ny = detail::kernel_axis_overlap(space, 1, pos[1], kernel.degree,
                                                   kernel.width, dofs_y, coef_y, 64);
        for (int j = 0; j < ny; ++j) {
          const std::size_t row = static_cast<std::size_t>(dofs_y[j]) * space.axis_dofs[0];
          for (int i = 0; i < nx; ++i) F[row + dofs_x[i]] += w * coef_y[j] * coef_x[i];
        }
      }
    }
  }
  if (outside && policy == OutOfDomainPolicy::Error) {
    throw ParticleOutOfDomain("deposit: marker outside Dirichlet domain");
  }
  for (int i = 0; i < space.n_dofs; ++i) {
    F[static_cast<std::size_t>(i)] -= rho0 * space.w_integral[static_cast<std::size_t>(i)];
  }
  return F;
}

void flow_hv(ParticleEnsemble& e, const FemSpace* space,
             const MagneticFieldSpec& field, double dt) {
  const detail::RotDrift rd = detail::make_rot_drift(field, dt);
  for (std::size_t s = 0; s < e.size(); ++s) {
    detail::push_one(rd, field.scale_x, e.x[0][s], e.x[1][s], e.x[2][s], e.v[0][s],
                     e.v[1][s], e.v[2][s]);
  }
  if (space && space->periodic()) {
    for (int a = 0; a < space->dim; ++a) {
      for (std::size_t s = 0; s < e.size(); ++s) {
        e.x[a][s] = wrap_coord(*space, a, e.x[a][s]);
      }
    }
  }
}

void apply_field_kick(ParticleEnsemble& e, const FemSpace& space,
                      const std::vector<double>& phi, double dt, double kappa_E,
                      OutOfDomainPolicy policy) {
  const double c = dt * kappa_E;
  bool outside = false;
  for (std::size_t s = 0; s < e.size(); ++s) {
    std::array<double, 2> pos{e.x[0][s], space.dim == 2 ? e.x[1][s] : 0.0};
    if (!space.periodic()) {
      bool out = false;
      for (int a = 0; a < space.dim; ++a) {
        if (pos[a] < space.lo[a] || pos[a] > space.hi[a]) out = true;
      }
      if (out) {
        outside = true;
        continue;
      }
    }
    const auto E = eval_field_at(space, phi, pos, OutOfDomainPolicy::Ignore);
    e.v[0][s] += c * E[0];
    if (space.dim == 2) e.v[1][s] += c * E[1];
  }
  if (outside && policy == OutOfDomainPolicy::Error) {
    throw ParticleOutOfDomain("apply_field_kick: marker outside Dirichlet domain");
  }
}

double sum(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void spmv(const SparseMatrix& m, const double* x, double* y) {
  for (int r = 0; r < m.size(); ++r) {
    double s = 0.0;
    for (int k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
      s += m.values()[k] * x[m.cols()[k]];
    }
    y[r] = s;
  }
}

double total_charge(const ParticleEnsemble& e) {
  double s = 0.0;
  for (const double w : e.w) s += w;
  return s;
}

double kinetic_energy(const ParticleEnsemble& e) {
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    s += 0.5 * e.w[i] *
         (e.v[0][i] * e.v[0][i] + e.v[1][i] * e.v[1][i] + e.v[2][i] * e.v[2][i]);
  }
  return s;
}

}  // namespace hpic::ref
