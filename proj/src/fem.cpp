#include "hpic/fem.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <tuple>

#include "hpic/errors.hpp"
#include "hpic/quadrature.hpp"
#include "hpic/reduce.hpp"

namespace hpic {

namespace {

// Lagrange shape functions on the reference cell [0, 1].
inline void shape_values(int order, double xi, double* n, double* d) {
  if (order == 1) {
    n[0] = 1.0 - xi;
    n[1] = xi;
    d[0] = -1.0;
    d[1] = 1.0;
  } else {
    n[0] = (1.0 - xi) * (1.0 - 2.0 * xi);
    n[1] = 4.0 * xi * (1.0 - xi);
    n[2] = xi * (2.0 * xi - 1.0);
    d[0] = 4.0 * xi - 3.0;
    d[1] = 4.0 - 8.0 * xi;
    d[2] = 4.0 * xi - 1.0;
  }
}

std::vector<double> axis_node_integrals(const FemSpace& space, int axis) {
  const int p = space.order;
  const int nn = space.cells[axis] * p + 1;  // nodes incl. right end
  std::vector<double> node_int(static_cast<std::size_t>(nn), 0.0);
  const GaussRule& gq = gauss_rule(p + 1);
  double n[3], d[3];
  for (int c = 0; c < space.cells[axis]; ++c) {
    for (std::size_t q = 0; q < gq.x.size(); ++q) {
      shape_values(p, gq.x[q], n, d);
      for (int l = 0; l <= p; ++l) {
        node_int[static_cast<std::size_t>(c * p + l)] += gq.w[q] * space.h[axis] * n[l];
      }
    }
  }
  if (space.periodic()) {
    node_int[0] += node_int[static_cast<std::size_t>(nn - 1)];
    node_int.resize(static_cast<std::size_t>(nn - 1));
  }
  return node_int;
}

}  // namespace

FemSpace build_space(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                     std::array<int, 2> cells, int order, BoundaryCondition bc) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("build_space: dim must be 1 or 2");
  if (order != 1 && order != 2) throw std::invalid_argument("build_space: order must be 1 or 2");
  FemSpace s;
  s.dim = dim;
  s.order = order;
  s.bc = bc;
  s.lo = lo;
  s.hi = hi;
  s.cells = cells;
  s.n_dofs = 1;
  for (int a = 0; a < dim; ++a) {
    if (cells[a] < 2) throw std::invalid_argument("build_space: need at least 2 cells per axis");
    if (!(hi[a] > lo[a])) throw std::invalid_argument("build_space: degenerate domain");
    s.h[a] = (hi[a] - lo[a]) / cells[a];
    const int nn = cells[a] * order;
    s.axis_dofs[a] = s.periodic() ? nn : nn - 1;
    s.n_dofs *= s.axis_dofs[a];
  }
  if (dim == 1) {
    s.cells[1] = 1;
    s.axis_dofs[1] = 1;
    s.h[1] = 1.0;
  }

  // Basis-function integrals (tensor product of the per-axis node integrals).
  const auto wx = axis_node_integrals(s, 0);
  s.w_integral.assign(static_cast<std::size_t>(s.n_dofs), 0.0);
  if (dim == 1) {
    for (int g = 0; g < cells[0] * order + (s.periodic() ? 0 : 1); ++g) {
      const int i = axis_dof_index(s, 0, g);
      if (i >= 0) s.w_integral[static_cast<std::size_t>(i)] = wx[static_cast<std::size_t>(g % wx.size())];
    }
  } else {
    const auto wy = axis_node_integrals(s, 1);
    const int ngx = cells[0] * order + (s.periodic() ? 0 : 1);
    const int ngy = cells[1] * order + (s.periodic() ? 0 : 1);
    for (int gy = 0; gy < ngy; ++gy) {
      const int iy = axis_dof_index(s, 1, gy);
      if (iy < 0) continue;
      for (int gx = 0; gx < ngx; ++gx) {
        const int ix = axis_dof_index(s, 0, gx);
        if (ix < 0) continue;
        s.w_integral[static_cast<std::size_t>(iy) * s.axis_dofs[0] + ix] =
            wx[static_cast<std::size_t>(gx % wx.size())] * wy[static_cast<std::size_t>(gy % wy.size())];
      }
    }
  }
  return s;
}

double wrap_coord(const FemSpace& space, int axis, double x) {
  if (!space.periodic()) return x;
  const double L = space.length(axis);
  double r = x - L * std::floor((x - space.lo[axis]) / L);
  if (r >= space.hi[axis]) r = space.lo[axis];
  if (r < space.lo[axis]) r = space.lo[axis];
  return r;
}

int axis_dof_index(const FemSpace& space, int axis, int node) {
  const int nn = space.cells[axis] * space.order;
  if (space.periodic()) {
    int m = node % nn;
    if (m < 0) m += nn;
    return m;
  }
  if (node <= 0 || node >= nn) return -1;
  return node - 1;
}

AxisBasis axis_basis(const FemSpace& space, int axis, double x) {
  AxisBasis b;
  const int p = space.order;
  b.count = p + 1;
  const double s = (x - space.lo[axis]) / space.h[axis];
  int cell = static_cast<int>(s);
  if (cell >= space.cells[axis]) cell = space.cells[axis] - 1;
  if (cell < 0) cell = 0;
  double xi = s - cell;
  if (xi < 0.0) xi = 0.0;
  if (xi > 1.0) xi = 1.0;
  double n[3], d[3];
  shape_values(p, xi, n, d);
  for (int l = 0; l <= p; ++l) {
    b.value[l] = n[l];
    b.deriv[l] = d[l] / space.h[axis];
    b.dof[l] = axis_dof_index(space, axis, cell * p + l);
  }
  return b;
}

SparseMatrix assemble_stiffness(const FemSpace& space) {
  const int p = space.order;
  const int nl = p + 1;
  const GaussRule& gq = gauss_rule(p + 1);

  // Per-axis local mass and stiffness blocks (uniform cells: same for all).
  double mass[2][3][3] = {};
  double stiff[2][3][3] = {};
  for (int a = 0; a < space.dim; ++a) {
    double n[3], d[3];
    for (std::size_t q = 0; q < gq.x.size(); ++q) {
      shape_values(p, gq.x[q], n, d);
      for (int i = 0; i < nl; ++i) {
        for (int j = 0; j < nl; ++j) {
          mass[a][i][j] += gq.w[q] * n[i] * n[j] * space.h[a];
          stiff[a][i][j] += gq.w[q] * d[i] * d[j] / space.h[a];
        }
      }
    }
  }

  // Accumulate each unordered DOF pair once, then mirror, so M is symmetric
  // bit for bit.
  std::vector<std::tuple<int, int, double>> upper;
  if (space.dim == 1) {
    upper.reserve(static_cast<std::size_t>(space.cells[0]) * nl * nl);
    for (int c = 0; c < space.cells[0]; ++c) {
      for (int i = 0; i < nl; ++i) {
        const int gi = axis_dof_index(space, 0, c * p + i);
        if (gi < 0) continue;
        for (int j = 0; j < nl; ++j) {
          const int gj = axis_dof_index(space, 0, c * p + j);
          if (gj < 0 || gi > gj) continue;
          upper.emplace_back(gi, gj, stiff[0][i][j]);
        }
      }
    }
  } else {
    upper.reserve(static_cast<std::size_t>(space.cells[0]) * space.cells[1] * nl * nl * nl * nl / 2);
    for (int cy = 0; cy < space.cells[1]; ++cy) {
      for (int cx = 0; cx < space.cells[0]; ++cx) {
        int gx[3], gy[3];
        for (int l = 0; l < nl; ++l) {
          gx[l] = axis_dof_index(space, 0, cx * p + l);
          gy[l] = axis_dof_index(space, 1, cy * p + l);
        }
        for (int ay = 0; ay < nl; ++ay) {
          if (gy[ay] < 0) continue;
          for (int ax = 0; ax < nl; ++ax) {
            if (gx[ax] < 0) continue;
            const int ga = gy[ay] * space.axis_dofs[0] + gx[ax];
            for (int by = 0; by < nl; ++by) {
              if (gy[by] < 0) continue;
              for (int bx = 0; bx < nl; ++bx) {
                if (gx[bx] < 0) continue;
                const int gb = gy[by] * space.axis_dofs[0] + gx[bx];
                if (ga > gb) continue;
                const double v = stiff[0][ax][bx] * mass[1][ay][by] +
                                 mass[0][ax][bx] * stiff[1][ay][by];
                upper.emplace_back(ga, gb, v);
              }
            }
          }
        }
      }
    }
  }

  SparseMatrix u = SparseMatrix::from_triplets(space.n_dofs, std::move(upper));
  std::vector<std::tuple<int, int, double>> full;
  full.reserve(static_cast<std::size_t>(u.nnz()) * 2);
  for (int r = 0; r < u.size(); ++r) {
    for (int k = u.row_ptr()[r]; k < u.row_ptr()[r + 1]; ++k) {
      const int c = u.cols()[k];
      const double v = u.values()[k];
      full.emplace_back(r, c, v);
      if (c != r) full.emplace_back(c, r, v);
    }
  }
  return SparseMatrix::from_triplets(space.n_dofs, std::move(full));
}

std::vector<double> assemble_load(const FemSpace& space,
                                  const std::function<double(double, double)>& f,
                                  int quad_points) {
  const int p = space.order;
  const GaussRule& gq = gauss_rule(quad_points);
  std::vector<double> F(static_cast<std::size_t>(space.n_dofs), 0.0);
  double nx[3], dx[3], ny[3], dy[3];
  if (space.dim == 1) {
    for (int c = 0; c < space.cells[0]; ++c) {
      for (std::size_t q = 0; q < gq.x.size(); ++q) {
        const double x = space.lo[0] + (c + gq.x[q]) * space.h[0];
        shape_values(p, gq.x[q], nx, dx);
        const double fx = f(x, 0.0) * gq.w[q] * space.h[0];
        for (int l = 0; l <= p; ++l) {
          const int g = axis_dof_index(space, 0, c * p + l);
          if (g >= 0) F[static_cast<std::size_t>(g)] += fx * nx[l];
        }
      }
    }
  } else {
    for (int cy = 0; cy < space.cells[1]; ++cy) {
      for (int cx = 0; cx < space.cells[0]; ++cx) {
        for (std::size_t qy = 0; qy < gq.x.size(); ++qy) {
          const double y = space.lo[1] + (cy + gq.x[qy]) * space.h[1];
          shape_values(p, gq.x[qy], ny, dy);
          for (std::size_t qx = 0; qx < gq.x.size(); ++qx) {
            const double x = space.lo[0] + (cx + gq.x[qx]) * space.h[0];
            shape_values(p, gq.x[qx], nx, dx);
            const double fw = f(x, y) * gq.w[qx] * gq.w[qy] * space.h[0] * space.h[1];
            for (int ly = 0; ly <= p; ++ly) {
              const int gy = axis_dof_index(space, 1, cy * p + ly);
              if (gy < 0) continue;
              for (int lx = 0; lx <= p; ++lx) {
                const int gx = axis_dof_index(space, 0, cx * p + lx);
                if (gx < 0) continue;
                F[static_cast<std::size_t>(gy) * space.axis_dofs[0] + gx] += fw * ny[ly] * nx[lx];
              }
            }
          }
        }
      }
    }
  }
  return F;
}

namespace {

void subtract_mean(std::vector<double>& v) {
  const double mean = det_sum(v) / static_cast<double>(v.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(v.size()); ++i) {
    v[static_cast<std::size_t>(i)] -= mean;
  }
}

}  // namespace

FieldCoefficients solve_poisson(const SparseMatrix& M, const std::vector<double>& F,
                                const FemSpace& space, const SolveOptions& opts) {
  const int n = M.size();
  if (static_cast<int>(F.size()) != n) throw std::invalid_argument("solve_poisson: size mismatch");
  const bool singular = space.periodic();

  FieldCoefficients out;
  out.phi.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<double> b = F;
  if (singular) {
    const double sum = det_sum(b);
    double l1 = det_sum(b.size(), [&](std::size_t i) { return std::abs(b[i]); });
    if (l1 > 0.0 && std::abs(sum) > 1e-10 * l1) {
      throw IncompatibleRhs("solve_poisson: periodic RHS has net charge |sum F| = " +
                            std::to_string(std::abs(sum)) +
                            " > 1e-10*||F||_1; check deposition / rho0");
    }
    subtract_mean(b);
  }

  const double bnorm = std::sqrt(det_dot(b, b));
  if (bnorm == 0.0) {
    out.residual_norm = 0.0;
    return out;
  }

  if (opts.initial_guess && static_cast<int>(opts.initial_guess->size()) == n) {
    out.phi = *opts.initial_guess;
    if (singular) subtract_mean(out.phi);
  }

  std::vector<double> inv_diag;
  if (opts.jacobi) {
    inv_diag = M.diagonal();
    for (auto& d : inv_diag) d = d != 0.0 ? 1.0 / d : 1.0;
  }

  std::vector<double>& x = out.phi;
  std::vector<double> r(static_cast<std::size_t>(n)), z, p, q(static_cast<std::size_t>(n));
  M.multiply(x.data(), r.data());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

  auto precond = [&](const std::vector<double>& rr, std::vector<double>& zz) {
    zz.resize(rr.size());
    if (opts.jacobi) {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) zz[i] = rr[i] * inv_diag[i];
    } else {
      zz = rr;
    }
  };

  precond(r, z);
  p = z;
  double rz = det_dot(r, z);
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * n;
  const double target = opts.tol * bnorm;

  int it = 0;
  double rnorm = std::sqrt(det_dot(r, r));
  while (rnorm > target) {
    if (it >= max_iter) {
      throw NonConvergence("solve_poisson: CG reached " + std::to_string(max_iter) +
                           " iterations, residual " + std::to_string(rnorm));
    }
    M.multiply(p.data(), q.data());
    const double pq = det_dot(p, q);
    const double alpha = rz / pq;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    ++it;
    if (singular && it % 64 == 0) subtract_mean(r);
    precond(r, z);
    const double rz_new = det_dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = std::sqrt(det_dot(r, r));
  }

  if (singular) subtract_mean(x);
  M.multiply(x.data(), q.data());
  out.residual_norm =
      std::sqrt(det_sum(q.size(), [&](std::size_t i) { return (q[i] - b[i]) * (q[i] - b[i]); }));
  out.iterations = it;
  return out;
}

std::array<double, 2> eval_field_at(const FemSpace& space, const std::vector<double>& phi,
                                    std::array<double, 2> x, OutOfDomainPolicy policy) {
  std::array<double, 2> E{0.0, 0.0};
  for (int a = 0; a < space.dim; ++a) {
    if (space.periodic()) {
      x[a] = wrap_coord(space, a, x[a]);
    } else if (x[a] < space.lo[a] || x[a] > space.hi[a]) {
      if (policy == OutOfDomainPolicy::Error) {
        throw ParticleOutOfDomain("eval_field_at: position outside Dirichlet domain");
      }
      return E;
    }
  }
  const AxisBasis bx = axis_basis(space, 0, x[0]);
  if (space.dim == 1) {
    double ex = 0.0;
    for (int l = 0; l < bx.count; ++l) {
      if (bx.dof[l] >= 0) ex += phi[static_cast<std::size_t>(bx.dof[l])] * bx.deriv[l];
    }
    E[0] = -ex;
    return E;
  }
  const AxisBasis by = axis_basis(space, 1, x[1]);
  double ex = 0.0, ey = 0.0;
  for (int ly = 0; ly < by.count; ++ly) {
    if (by.dof[ly] < 0) continue;
    const std::size_t row = static_cast<std::size_t>(by.dof[ly]) * space.axis_dofs[0];
    for (int lx = 0; lx < bx.count; ++lx) {
      if (bx.dof[lx] < 0) continue;
      const double c = phi[row + bx.dof[lx]];
      ex += c * bx.deriv[lx] * by.value[ly];
      ey += c * bx.value[lx] * by.deriv[ly];
    }
  }
  E[0] = -ex;
  E[1] = -ey;
  return E;
}

double eval_potential_at(const FemSpace& space, const std::vector<double>& phi,
                         std::array<double, 2> x) {
  for (int a = 0; a < space.dim; ++a) x[a] = wrap_coord(space, a, x[a]);
  const AxisBasis bx = axis_basis(space, 0, x[0]);
  if (space.dim == 1) {
    double v = 0.0;
    for (int l = 0; l < bx.count; ++l) {
      if (bx.dof[l] >= 0) v += phi[static_cast<std::size_t>(bx.dof[l])] * bx.value[l];
    }
    return v;
  }
  const AxisBasis by = axis_basis(space, 1, x[1]);
  double v = 0.0;
  for (int ly = 0; ly < by.count; ++ly) {
    if (by.dof[ly] < 0) continue;
    const std::size_t row = static_cast<std::size_t>(by.dof[ly]) * space.axis_dofs[0];
    for (int lx = 0; lx < bx.count; ++lx) {
      if (bx.dof[lx] < 0) continue;
      v += phi[row + bx.dof[lx]] * bx.value[lx] * by.value[ly];
    }
  }
  return v;
}

double l2_error(const FemSpace& space, const std::vector<double>& phi,
                const std::function<double(double, double)>& ref, int quad_points) {
  const GaussRule& gq = gauss_rule(quad_points);
  double acc = 0.0;
  if (space.dim == 1) {
    for (int c = 0; c < space.cells[0]; ++c) {
      for (std::size_t q = 0; q < gq.x.size(); ++q) {
        const double x = space.lo[0] + (c + gq.x[q]) * space.h[0];
        const double d = eval_potential_at(space, phi, {x, 0.0}) - ref(x, 0.0);
        acc += gq.w[q] * space.h[0] * d * d;
      }
    }
  } else {
    for (int cy = 0; cy < space.cells[1]; ++cy) {
      for (int cx = 0; cx < space.cells[0]; ++cx) {
        for (std::size_t qy = 0; qy < gq.x.size(); ++qy) {
          const double y = space.lo[1] + (cy + gq.x[qy]) * space.h[1];
          for (std::size_t qx = 0; qx < gq.x.size(); ++qx) {
            const double x = space.lo[0] + (cx + gq.x[qx]) * space.h[0];
            const double d = eval_potential_at(space, phi, {x, y}) - ref(x, y);
            acc += gq.w[qx] * gq.w[qy] * space.h[0] * space.h[1] * d * d;
          }
        }
      }
    }
  }
  return std::sqrt(acc);
}

}  // namespace hpic
