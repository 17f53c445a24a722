#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "hpic/fem.hpp"

namespace hpic {

// Marker ensemble in structure-of-arrays layout. Velocities always carry
// three components so the rotation algebra is uniform; positions do too,
// with inactive axes just streaming freely. Weights are fixed at
// initialization and never written afterwards.
struct ParticleEnsemble {
  int dim = 1;  // spatial dimension seen by the field solve
  std::array<std::vector<double>, 3> x;
  std::array<std::vector<double>, 3> v;
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
  void resize(std::size_t n) {
    for (auto& c : x) c.assign(n, 0.0);
    for (auto& c : v) c.assign(n, 0.0);
    w.assign(n, 0.0);
  }
};

enum class KernelShape { Delta, BSpline };

// Charge-assignment kernel: either the bare delta (nodal evaluation) or a
// centered B-spline of the given degree scaled to width epsilon per axis,
// unit mass, support (degree+1)*epsilon.
struct SmoothingKernel {
  KernelShape shape = KernelShape::Delta;
  int degree = 1;
  double width = 0.0;
};

// Centered cardinal B-spline of degree p (unit knots), support |u| <= (p+1)/2.
double bspline_value(int degree, double u);

namespace detail {
// Per-axis overlap integrals (S_eps(.-x), W_node) of one marker coordinate
// against every basis function it touches; writes (dof, coeff) pairs and
// returns their count. Exact for the piecewise-polynomial product.
int kernel_axis_overlap(const FemSpace& space, int axis, double x, int degree,
                        double eps, int* dofs, double* coeffs, int cap);
}  // namespace detail

using LoadVector = std::vector<double>;

struct DepositOptions {
  OutOfDomainPolicy policy = OutOfDomainPolicy::Error;
  // Fixed bucket count keeps the reduction order independent of the thread
  // count; set deterministic=false to use one bucket per thread instead.
  bool deterministic = true;
  int buckets = 64;
};

// Reusable accumulation buffers for the bucketed deposit.
struct DepositWorkspace {
  std::vector<double> partial;
};

// F_i = sum_s w_s (S_eps(.-X_s), W_i) - rho0 (1, W_i). Delta kernel reduces
// to nodal evaluation; B-spline overlaps are integrated exactly with
// per-piece Gauss quadrature.
LoadVector deposit(const ParticleEnsemble& e, const SmoothingKernel& kernel,
                   const FemSpace& space, double rho0,
                   const DepositOptions& opts = {},
                   DepositWorkspace* ws = nullptr);

// Exact (compensated, deterministic) ensemble moments.
double total_charge(const ParticleEnsemble& e);
std::array<double, 3> total_momentum(const ParticleEnsemble& e);
double kinetic_energy(const ParticleEnsemble& e);

// Wraps positions into the domain on periodic axes; idempotent.
void wrap_positions(ParticleEnsemble& e, const FemSpace& space);

}  // namespace hpic
