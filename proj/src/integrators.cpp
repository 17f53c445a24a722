#include "hpic/integrators.hpp"

#include <atomic>
#include <cmath>

#include "hpic/errors.hpp"

namespace hpic {

namespace detail {

namespace {

// hat(B) with hat(B) v = v x B.
inline std::array<double, 9> hat_of(const std::array<double, 3>& B) {
  return {0.0, B[2], -B[1], -B[2], 0.0, B[0], B[1], -B[0], 0.0};
}

inline std::array<double, 9> matmul3(const std::array<double, 9>& a,
                                     const std::array<double, 9>& b) {
  std::array<double, 9> c{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      c[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
    }
  }
  return c;
}

}  // namespace

RotDrift make_rot_drift(const MagneticFieldSpec& field, double dt) {
  RotDrift rd;
  const std::array<double, 3> Bp{field.scale_B * field.B[0], field.scale_B * field.B[1],
                                 field.scale_B * field.B[2]};
  const double b = std::sqrt(Bp[0] * Bp[0] + Bp[1] * Bp[1] + Bp[2] * Bp[2]);
  if (b == 0.0) {
    rd.pure_drift = true;
    rd.drift[0] = dt;
    return rd;
  }

  const double theta = b * dt;
  double c1, c2, c3;  // sin/b, (1-cos)/b^2, (b dt - sin)/b^3
  if (std::abs(theta) < 1e-6) {
    const double t2 = theta * theta;
    c1 = dt * (1.0 - t2 / 6.0 * (1.0 - t2 / 20.0));
    c2 = 0.5 * dt * dt * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0));
    c3 = dt * dt * dt / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0));
  } else {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    c1 = s / b;
    c2 = (1.0 - c) / (b * b);
    c3 = (theta - s) / (b * b * b);
  }

  const auto H = hat_of(Bp);
  const auto H2 = matmul3(H, H);
  for (int i = 0; i < 9; ++i) {
    rd.rot[i] = c1 * H[i] + c2 * H2[i];
    rd.drift[i] = c2 * H[i] + c3 * H2[i];
  }
  for (int i = 0; i < 3; ++i) {
    rd.rot[4 * i] += 1.0;
    rd.drift[4 * i] += dt;
  }
  return rd;
}

}  // namespace detail

void flow_hv(ParticleEnsemble& e, const FemSpace* space,
             const MagneticFieldSpec& field, double dt) {
  const detail::RotDrift rd = detail::make_rot_drift(field, dt);
  const double kx = field.scale_x;
  auto* x0 = e.x[0].data();
  auto* x1 = e.x[1].data();
  auto* x2 = e.x[2].data();
  auto* v0 = e.v[0].data();
  auto* v1 = e.v[1].data();
  auto* v2 = e.v[2].data();
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(e.size()); ++s) {
    detail::push_one(rd, kx, x0[s], x1[s], x2[s], v0[s], v1[s], v2[s]);
  }
  if (space && space->periodic()) wrap_positions(e, *space);
}

void apply_field_kick(ParticleEnsemble& e, const FemSpace& space,
                      const std::vector<double>& phi, double dt, double kappa_E,
                      OutOfDomainPolicy policy) {
  const double c = dt * kappa_E;
  const bool dirichlet = !space.periodic();
  std::atomic<bool> outside{false};
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(e.size()); ++s) {
    std::array<double, 2> pos{e.x[0][s], space.dim == 2 ? e.x[1][s] : 0.0};
    if (dirichlet) {
      bool out = false;
      for (int a = 0; a < space.dim; ++a) {
        if (pos[a] < space.lo[a] || pos[a] > space.hi[a]) out = true;
      }
      if (out) {
        outside.store(true, std::memory_order_relaxed);
        continue;  // vacuum: no field
      }
    }
    const auto E = eval_field_at(space, phi, pos, OutOfDomainPolicy::Ignore);
    e.v[0][s] += c * E[0];
    if (space.dim == 2) e.v[1][s] += c * E[1];
  }
  if (outside.load() && policy == OutOfDomainPolicy::Error) {
    throw ParticleOutOfDomain("apply_field_kick: marker outside Dirichlet domain");
  }
}

FieldCoefficients flow_he(ParticleEnsemble& e, FieldContext& ctx, double dt,
                          double kappa_E) {
  LoadVector F = deposit(e, ctx.kernel, *ctx.space, ctx.rho0, ctx.deposit_opts, &ctx.ws);
  SolveOptions so;
  so.tol = ctx.solver.tol;
  so.max_iter = ctx.solver.max_iter;
  so.jacobi = ctx.solver.jacobi;
  if (ctx.solver.warm_start && ctx.warm_phi.size() == F.size()) {
    so.initial_guess = &ctx.warm_phi;
  }
  FieldCoefficients fc = solve_poisson(*ctx.M, F, *ctx.space, so);
  if (ctx.solver.warm_start) ctx.warm_phi = fc.phi;
  apply_field_kick(e, *ctx.space, fc.phi, dt, kappa_E, ctx.deposit_opts.policy);
  return fc;
}

FieldCoefficients solve_fields(const ParticleEnsemble& e, FieldContext& ctx) {
  LoadVector F = deposit(e, ctx.kernel, *ctx.space, ctx.rho0, ctx.deposit_opts, &ctx.ws);
  SolveOptions so;
  so.tol = ctx.solver.tol;
  so.max_iter = ctx.solver.max_iter;
  so.jacobi = ctx.solver.jacobi;
  if (ctx.solver.warm_start && ctx.warm_phi.size() == F.size()) {
    so.initial_guess = &ctx.warm_phi;
  }
  FieldCoefficients fc = solve_poisson(*ctx.M, F, *ctx.space, so);
  if (ctx.solver.warm_start) ctx.warm_phi = fc.phi;
  return fc;
}

FieldCoefficients step(ParticleEnsemble& e, FieldContext& ctx,
                       const MagneticFieldSpec& field, const SplittingScheme& scheme) {
  const double dt = scheme.dt;
  if (scheme.kind == SplitKind::Lie) {
    flow_hv(e, ctx.space, field, dt);
    return flow_he(e, ctx, dt, field.scale_E);
  }
  flow_hv(e, ctx.space, field, 0.5 * dt);
  FieldCoefficients fc = flow_he(e, ctx, dt, field.scale_E);
  flow_hv(e, ctx.space, field, 0.5 * dt);
  return fc;
}

}  // namespace hpic
