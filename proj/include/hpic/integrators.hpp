#pragma once

#include <array>

#include "hpic/fem.hpp"
#include "hpic/particles.hpp"

namespace hpic {

// External magnetic field with the scaling factors of the strong-field
// regime: positions drift with scale_x, the electric kick carries scale_E,
// and the rotation uses scale_B (all 1 recovers the unscaled equations;
// the 1/eps regime uses scale_x = scale_E = 1/eps, scale_B = 1/eps^2).
struct MagneticFieldSpec {
  std::array<double, 3> B{0.0, 0.0, 0.0};
  double scale_x = 1.0;
  double scale_E = 1.0;
  double scale_B = 1.0;
};

enum class SplitKind { Lie, Strang };

struct SplittingScheme {
  SplitKind kind = SplitKind::Strang;
  double dt = 0.01;
};

struct SolverConfig {
  double tol = 1e-10;
  int max_iter = -1;  // < 0 means 10*N
  bool jacobi = true;
  bool warm_start = true;
};

// Everything the field substep needs, plus reusable scratch. The stiffness
// matrix is immutable and shareable; the context owns only solver state.
struct FieldContext {
  const FemSpace* space = nullptr;
  const SparseMatrix* M = nullptr;
  SmoothingKernel kernel;
  double rho0 = 0.0;
  SolverConfig solver;
  DepositOptions deposit_opts;

  std::vector<double> warm_phi;
  DepositWorkspace ws;
};

namespace detail {

// Rotation exp(dt * hat(B')) and integrated drift of the kinetic sub-flow,
// B' = scale_B * B. Trigonometric coefficients switch to series forms for
// |B'| dt < 1e-6 to avoid cancellation.
struct RotDrift {
  std::array<double, 9> rot{};    // row-major 3x3
  std::array<double, 9> drift{};  // includes the dt factor
  bool pure_drift = false;        // B' == 0
};

RotDrift make_rot_drift(const MagneticFieldSpec& field, double dt);

// Shared by the OpenMP and serial reference loops so both produce identical
// bits for one marker.
inline void push_one(const RotDrift& rd, double scale_x, double& x0, double& x1,
                     double& x2, double& v0, double& v1, double& v2) {
  if (rd.pure_drift) {
    const double dt_eff = scale_x * rd.drift[0];
    x0 += dt_eff * v0;
    x1 += dt_eff * v1;
    x2 += dt_eff * v2;
    return;
  }
  const auto& R = rd.rot;
  const auto& D = rd.drift;
  const double dx0 = D[0] * v0 + D[1] * v1 + D[2] * v2;
  const double dx1 = D[3] * v0 + D[4] * v1 + D[5] * v2;
  const double dx2 = D[6] * v0 + D[7] * v1 + D[8] * v2;
  const double w0 = R[0] * v0 + R[1] * v1 + R[2] * v2;
  const double w1 = R[3] * v0 + R[4] * v1 + R[5] * v2;
  const double w2 = R[6] * v0 + R[7] * v1 + R[8] * v2;
  x0 += scale_x * dx0;
  x1 += scale_x * dx1;
  x2 += scale_x * dx2;
  v0 = w0;
  v1 = w1;
  v2 = w2;
}

}  // namespace detail

// Exact flow of the kinetic part over dt: rotation of V about B and the
// integrated drift of X; positions wrapped on periodic axes afterwards
// (pass space = nullptr to skip wrapping).
void flow_hv(ParticleEnsemble& e, const FemSpace* space,
             const MagneticFieldSpec& field, double dt);

// V_s -= kappa_E * dt * sum_j phi_j grad W_j(X_s); X untouched.
void apply_field_kick(ParticleEnsemble& e, const FemSpace& space,
                      const std::vector<double>& phi, double dt, double kappa_E,
                      OutOfDomainPolicy policy);

// Exact flow of the field part over dt: deposit with frozen X, solve
// M phi = F, kick velocities. Returns the coefficients for diagnostics.
FieldCoefficients flow_he(ParticleEnsemble& e, FieldContext& ctx, double dt,
                          double kappa_E);

// Deposit + solve only (no kick); used for t = 0 diagnostics.
FieldCoefficients solve_fields(const ParticleEnsemble& e, FieldContext& ctx);

// One splitting step; rightmost factor acts first.
//   Lie:    phi_He(dt) o phi_Hv(dt)
//   Strang: phi_Hv(dt/2) o phi_He(dt) o phi_Hv(dt/2)
FieldCoefficients step(ParticleEnsemble& e, FieldContext& ctx,
                       const MagneticFieldSpec& field, const SplittingScheme& scheme);

}  // namespace hpic
