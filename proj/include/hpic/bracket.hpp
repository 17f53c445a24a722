#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "hpic/particles.hpp"

namespace hpic {

// Small dense row-major matrix for the verification tooling.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

using FieldFn = std::function<std::array<double, 3>(const std::array<double, 3>&)>;

// Skew matrix with hat(B) v = v x B.
DenseMatrix hat_matrix(const std::array<double, 3>& B);

// Phase-space ordering for the matrix form: Z = (X_1..X_Np, V_1..V_Np),
// three components per particle. K(X) = [[0, N^-1], [-N^-1, N^-1 hat(B)]]
// with N = diag(w) (x) I.
DenseMatrix build_poisson_matrix(const ParticleEnsemble& e, const FieldFn& b0);

// (grad F)^T K (grad G); gradients of length 6*Np.
double discrete_bracket(std::span<const double> grad_f, std::span<const double> grad_g,
                        const DenseMatrix& K);

struct JacobiOptions {
  double delta_scale = 1e-5;  // FD step: delta_scale * max(1, |Z_l|)
  bool richardson = false;    // extrapolate with steps delta and delta/2
};

// Cyclic sum  sum_l (dK_ij/dZ_l K_lk + dK_jk/dZ_l K_li + dK_ki/dZ_l K_lj)
// with central finite differences; zero for divergence-free fields.
double jacobi_residual(const ParticleEnsemble& e, const FieldFn& b0, int i, int j,
                       int k, const JacobiOptions& opts = {});

struct JacobiScan {
  // Largest |residual| over triples expected to vanish (everything except
  // the all-distinct velocity triples of one particle under div B != 0).
  double max_zero_expected = 0.0;
  // Per-particle extremal residual on its velocity component triple.
  std::vector<double> velocity_triple_residual;
  std::size_t triples = 0;
};

// Evaluates every index triple (derivative tensor computed once).
JacobiScan jacobi_scan(const ParticleEnsemble& e, const FieldFn& b0,
                       const JacobiOptions& opts = {});

// Text report: one line per triple with its classification.
void write_jacobi_report(std::ostream& os, const ParticleEnsemble& e,
                         const FieldFn& b0, const JacobiOptions& opts = {});

}  // namespace hpic
