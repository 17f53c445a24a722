#pragma once

#include <array>
#include <functional>
#include <vector>

#include "hpic/sparse.hpp"

namespace hpic {

enum class BoundaryCondition { Periodic, DirichletZero };

// Tensor-product Lagrange elements of order 1 or 2 on a uniform axis-aligned
// grid. DOFs are the nodal values; Dirichlet excludes boundary nodes,
// periodic identifies the two ends of each axis.
//
// Per-axis node g = cell*order + local sits at lo + g*h/order. The global
// DOF index is ix + iy*axis_dofs[0] (2D) with ix, iy the per-axis DOF
// indices.
struct FemSpace {
  int dim = 1;
  int order = 1;
  BoundaryCondition bc = BoundaryCondition::Periodic;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> cells{1, 1};

  std::array<double, 2> h{1.0, 1.0};
  std::array<int, 2> axis_dofs{0, 0};
  int n_dofs = 0;

  // Integrals of the basis functions, used for background subtraction.
  std::vector<double> w_integral;

  double length(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const {
    return dim == 1 ? length(0) : length(0) * length(1);
  }
  bool periodic() const { return bc == BoundaryCondition::Periodic; }
};

FemSpace build_space(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                     std::array<int, 2> cells, int order, BoundaryCondition bc);

// Maps a coordinate into [lo, hi) on a periodic axis; identity otherwise.
double wrap_coord(const FemSpace& space, int axis, double x);

// Values, derivatives and per-axis DOF indices of the basis functions alive
// at x along one axis. dof == -1 marks an excluded Dirichlet boundary node.
struct AxisBasis {
  int count = 0;
  std::array<double, 3> value{};
  std::array<double, 3> deriv{};
  std::array<int, 3> dof{};
};

AxisBasis axis_basis(const FemSpace& space, int axis, double x);

// Per-axis DOF index of node g (periodic wraps, Dirichlet boundary -> -1).
int axis_dof_index(const FemSpace& space, int axis, int node);

SparseMatrix assemble_stiffness(const FemSpace& space);

// Load vector (f, W_i) for an analytic density, by per-cell Gauss quadrature.
std::vector<double> assemble_load(const FemSpace& space,
                                  const std::function<double(double, double)>& f,
                                  int quad_points = 5);

struct FieldCoefficients {
  std::vector<double> phi;
  double residual_norm = 0.0;
  int iterations = 0;
};

struct SolveOptions {
  double tol = 1e-10;        // relative residual target
  int max_iter = -1;         // < 0 means 10*N
  bool jacobi = true;
  const std::vector<double>* initial_guess = nullptr;
};

// Conjugate gradients for M phi = F. For the periodic (singular) operator
// the RHS and iterates are kept orthogonal to the constant vector and the
// solution is gauged to zero mean. A periodic RHS with |sum F| above
// 1e-10*||F||_1 is rejected as incompatible.
FieldCoefficients solve_poisson(const SparseMatrix& M, const std::vector<double>& F,
                                const FemSpace& space, const SolveOptions& opts = {});

enum class OutOfDomainPolicy { Error, Ignore };

// E_h(x) = -sum_j phi_j grad W_j(x). Positions outside a Dirichlet domain
// either throw or yield zero field depending on the policy.
std::array<double, 2> eval_field_at(const FemSpace& space,
                                    const std::vector<double>& phi,
                                    std::array<double, 2> x,
                                    OutOfDomainPolicy policy = OutOfDomainPolicy::Error);

// phi_h(x), mainly for manufactured-solution checks.
double eval_potential_at(const FemSpace& space, const std::vector<double>& phi,
                         std::array<double, 2> x);

// L2 norm of (phi_h - ref) over the domain by per-cell quadrature.
double l2_error(const FemSpace& space, const std::vector<double>& phi,
                const std::function<double(double, double)>& ref,
                int quad_points = 5);

}  // namespace hpic
