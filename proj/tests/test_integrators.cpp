#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <array>
#include <cmath>

#include "hpic/integrators.hpp"
#include "hpic/rng.hpp"
#include "hpic/scenarios.hpp"
#include "oracles.hpp"

using namespace hpic;

namespace {

ScenarioSpec small_landau(std::size_t np, std::uint64_t seed = 7) {
  ScenarioSpec sc;
  sc.kind = ScenarioKind::Landau;
  sc.alpha = 0.05;  // strong enough to produce visible fields at small np
  sc.k = 0.5;
  sc.np = np;
  sc.seed = seed;
  sc.lo = {0.0, 0.0};
  sc.hi = {4.0 * M_PI, 1.0};
  sc.vmax = 6.0;
  return sc;
}

struct System {
  FemSpace space;
  SparseMatrix M;
  FieldContext ctx;
  System(const ScenarioSpec& sc, int cells, bool warm = true)
      : space(build_space(1, sc.lo, sc.hi, {cells, 1}, 1, BoundaryCondition::Periodic)),
        M(assemble_stiffness(space)) {
    ctx.space = &space;
    ctx.M = &M;
    ctx.rho0 = scenario_rho0(sc);
    ctx.solver.warm_start = warm;
  }
};

// RK4 on the scaled single-particle system: dX/dt = kx V, dV/dt = kB V x B.
void rk4_oracle(std::array<double, 3>& x, std::array<double, 3>& v,
                const MagneticFieldSpec& f, double t_final, int nsub) {
  auto acc = [&](const std::array<double, 3>& vv) {
    return std::array<double, 3>{
        f.scale_B * (vv[1] * f.B[2] - vv[2] * f.B[1]),
        f.scale_B * (vv[2] * f.B[0] - vv[0] * f.B[2]),
        f.scale_B * (vv[0] * f.B[1] - vv[1] * f.B[0])};
  };
  const double h = t_final / nsub;
  for (int n = 0; n < nsub; ++n) {
    std::array<double, 3> kx1, kv1, kx2, kv2, kx3, kv3, kx4, kv4, xt, vt;
    auto scale = [&](const std::array<double, 3>& vv) {
      return std::array<double, 3>{f.scale_x * vv[0], f.scale_x * vv[1], f.scale_x * vv[2]};
    };
    kx1 = scale(v);
    kv1 = acc(v);
    for (int c = 0; c < 3; ++c) vt[c] = v[c] + 0.5 * h * kv1[c];
    kx2 = scale(vt);
    kv2 = acc(vt);
    for (int c = 0; c < 3; ++c) vt[c] = v[c] + 0.5 * h * kv2[c];
    kx3 = scale(vt);
    kv3 = acc(vt);
    for (int c = 0; c < 3; ++c) vt[c] = v[c] + h * kv3[c];
    kx4 = scale(vt);
    kv4 = acc(vt);
    (void)xt;
    for (int c = 0; c < 3; ++c) {
      x[c] += h / 6.0 * (kx1[c] + 2.0 * kx2[c] + 2.0 * kx3[c] + kx4[c]);
      v[c] += h / 6.0 * (kv1[c] + 2.0 * kv2[c] + 2.0 * kv3[c] + kv4[c]);
    }
  }
}

}  // namespace

TEST_CASE("flow_hv with B = 0 is free streaming") {
  ParticleEnsemble e;
  e.dim = 2;
  e.resize(3);
  e.x[0] = {0.1, 0.2, 0.3};
  e.x[1] = {1.0, 2.0, 3.0};
  e.v[0] = {1.0, -2.0, 0.5};
  e.v[1] = {0.0, 1.0, -1.0};
  for (auto& w : e.w) w = 1.0;
  const auto x0 = e.x, v0 = e.v;
  flow_hv(e, nullptr, MagneticFieldSpec{}, 0.25);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(e.x[0][s] == x0[0][s] + 0.25 * v0[0][s]);
    CHECK(e.x[1][s] == x0[1][s] + 0.25 * v0[1][s]);
    CHECK(e.v[0][s] == v0[0][s]);
    CHECK(e.v[1][s] == v0[1][s]);
  }
}

TEST_CASE("flow_hv quarter gyration about z") {
  ParticleEnsemble e;
  e.dim = 2;
  e.resize(1);
  e.v[0][0] = 1.0;
  e.w[0] = 1.0;
  MagneticFieldSpec f;
  f.B = {0.0, 0.0, 1.0};
  flow_hv(e, nullptr, f, 0.5 * M_PI);
  CHECK(e.v[0][0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(e.v[1][0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(e.v[2][0] == 0.0);
}

TEST_CASE("flow_hv preserves speed for random fields") {
  Rng rng(99);
  for (int t = 0; t < 1000; ++t) {
    ParticleEnsemble e;
    e.dim = 2;
    e.resize(1);
    for (int c = 0; c < 3; ++c) e.v[c][0] = rng.normal();
    e.w[0] = 1.0;
    MagneticFieldSpec f;
    for (auto& b : f.B) b = rng.normal();
    const double s0 = std::sqrt(e.v[0][0] * e.v[0][0] + e.v[1][0] * e.v[1][0] +
                                e.v[2][0] * e.v[2][0]);
    flow_hv(e, nullptr, f, 0.1 + rng.u01());
    const double s1 = std::sqrt(e.v[0][0] * e.v[0][0] + e.v[1][0] * e.v[1][0] +
                                e.v[2][0] * e.v[2][0]);
    CHECK(std::abs(s1 - s0) <= 1e-13 * s0);
  }
}

TEST_CASE("flow_hv matches an RK4 oracle, including the scaled regime") {
  MagneticFieldSpec f;
  f.B = {0.0, 0.0, 1.0};
  f.scale_x = 10.0;
  f.scale_E = 10.0;
  f.scale_B = 100.0;
  ParticleEnsemble e;
  e.dim = 2;
  e.resize(1);
  e.x[0][0] = 0.3;
  e.x[1][0] = -0.2;
  e.v[0][0] = 0.7;
  e.v[1][0] = -0.1;
  e.v[2][0] = 0.4;
  e.w[0] = 1.0;

  std::array<double, 3> x{0.3, -0.2, 0.0}, v{0.7, -0.1, 0.4};
  rk4_oracle(x, v, f, 0.013, 20000);
  flow_hv(e, nullptr, f, 0.013);
  for (int c = 0; c < 3; ++c) {
    CHECK(e.x[c][0] == doctest::Approx(x[static_cast<std::size_t>(c)]).epsilon(1e-11));
    CHECK(e.v[c][0] == doctest::Approx(v[static_cast<std::size_t>(c)]).epsilon(1e-11));
  }
}

TEST_CASE("flow_hv is continuous across the series-expansion threshold") {
  for (const double theta : {0.9e-6, 1.1e-6}) {
    MagneticFieldSpec f;
    f.B = {0.0, 0.0, theta};  // dt = 1 below
    ParticleEnsemble e;
    e.dim = 2;
    e.resize(1);
    e.x[0][0] = 0.0;
    e.v[0][0] = 1.0;
    e.v[1][0] = 0.5;
    e.w[0] = 1.0;
    flow_hv(e, nullptr, f, 1.0);
    // d/dt v = v x B: |B| tiny, so x ~ x0 + v0 t + O(theta)
    CHECK(e.x[0][0] == doctest::Approx(1.0 + 0.5 * theta / 2.0).epsilon(1e-9));
    CHECK(e.v[0][0] == doctest::Approx(1.0 + 0.5 * theta).epsilon(1e-9));
  }
}

TEST_CASE("flow_he: uniform neutral plasma leaves velocities untouched") {
  // markers exactly on the nodes of a unit-width grid: F vanishes exactly
  ScenarioSpec sc;
  sc.lo = {0.0, 0.0};
  sc.hi = {16.0, 1.0};
  System sys(sc, 16);
  ParticleEnsemble e;
  e.dim = 1;
  e.resize(16);
  for (int j = 0; j < 16; ++j) {
    e.x[0][static_cast<std::size_t>(j)] = static_cast<double>(j);
    e.v[0][static_cast<std::size_t>(j)] = 0.3 * j;
    e.w[static_cast<std::size_t>(j)] = 1.0;
  }
  sys.ctx.rho0 = 1.0;
  const auto v0 = e.v[0];
  const auto fc = flow_he(e, sys.ctx, 0.1, 1.0);
  for (const double p : fc.phi) CHECK(p == 0.0);
  CHECK(e.v[0] == v0);
}

TEST_CASE("flow_he leaves positions bit-exact") {
  const ScenarioSpec sc = small_landau(500);
  System sys(sc, 32);
  auto e = sample_landau(sc);
  const auto x0 = e.x[0];
  flow_he(e, sys.ctx, 0.05, 1.0);
  CHECK(e.x[0] == x0);
}

TEST_CASE("field kick matches a dense brute-force gradient sum") {
  const FemSpace s = build_space(1, {0.0, 0.0}, {1.0, 1.0}, {8, 1}, 2,
                                 BoundaryCondition::DirichletZero);
  Rng rng(31);
  std::vector<double> phi(static_cast<std::size_t>(s.n_dofs));
  for (auto& p : phi) p = rng.normal();

  ParticleEnsemble e;
  e.dim = 1;
  e.resize(1);
  e.x[0][0] = 0.37;
  e.w[0] = 1.0;
  const double dt = 0.2;
  apply_field_kick(e, s, phi, dt, 1.0, OutOfDomainPolicy::Error);

  // dense loop over every basis function, gradient by central differences
  double kick = 0.0;
  for (int j = 0; j < s.n_dofs; ++j) {
    std::vector<double> unit(static_cast<std::size_t>(s.n_dofs), 0.0);
    unit[static_cast<std::size_t>(j)] = 1.0;
    const double d = 1e-7;
    const double grad = (eval_potential_at(s, unit, {0.37 + d, 0.0}) -
                         eval_potential_at(s, unit, {0.37 - d, 0.0})) /
                        (2.0 * d);
    kick -= dt * phi[static_cast<std::size_t>(j)] * grad;
  }
  CHECK(e.v[0][0] == doctest::Approx(kick).epsilon(1e-7));
}

TEST_CASE("composition order: rightmost factor first") {
  const ScenarioSpec sc = small_landau(300);
  const SplittingScheme lie{SplitKind::Lie, 0.05};

  System a(sc, 32, false), b(sc, 32, false), c(sc, 32, false);
  auto ea = sample_landau(sc);
  auto eb = sample_landau(sc);
  auto ec = sample_landau(sc);

  step(ea, a.ctx, MagneticFieldSpec{}, lie);

  flow_hv(eb, &b.space, MagneticFieldSpec{}, 0.05);
  flow_he(eb, b.ctx, 0.05, 1.0);
  CHECK(ea.x[0] == eb.x[0]);
  CHECK(ea.v[0] == eb.v[0]);

  flow_he(ec, c.ctx, 0.05, 1.0);
  flow_hv(ec, &c.space, MagneticFieldSpec{}, 0.05);
  CHECK(ea.v[0] != ec.v[0]);
}

TEST_CASE("strang with a frozen field equals the leapfrog formulas") {
  const FemSpace s = build_space(1, {0.0, 0.0}, {1.0, 1.0}, {16, 1}, 2,
                                 BoundaryCondition::DirichletZero);
  Rng rng(8);
  std::vector<double> phi(static_cast<std::size_t>(s.n_dofs));
  for (auto& p : phi) p = 0.1 * rng.normal();

  const double h = 0.05;
  const double x0 = 0.441, v0 = 0.8;
  ParticleEnsemble e;
  e.dim = 1;
  e.resize(1);
  e.x[0][0] = x0;
  e.v[0][0] = v0;
  e.w[0] = 1.0;
  // drift-kick-drift with the same frozen coefficients
  flow_hv(e, &s, MagneticFieldSpec{}, 0.5 * h);
  apply_field_kick(e, s, phi, h, 1.0, OutOfDomainPolicy::Error);
  flow_hv(e, &s, MagneticFieldSpec{}, 0.5 * h);

  const double x_mid = x0 + 0.5 * h * v0;
  const double v1 = v0 + h * eval_field_at(s, phi, {x_mid, 0.0})[0];
  const double x1 = x_mid + 0.5 * h * v1;
  CHECK(e.x[0][0] == doctest::Approx(x1).epsilon(1e-15));
  CHECK(e.v[0][0] == doctest::Approx(v1).epsilon(1e-15));
}

TEST_CASE("splitting orders: lie ~ dt, strang ~ dt^2") {
  const ScenarioSpec sc = small_landau(400, 3);
  const double T = 0.5;
  std::vector<double> dts{0.1, 0.05, 0.025};
  std::vector<double> err_lie, err_strang;

  for (const double dt : dts) {
    auto run = [&](SplitKind kind, double step_dt) {
      System sys(sc, 32);
      auto e = sample_landau(sc);
      const int n = static_cast<int>(T / step_dt + 0.5);
      const SplittingScheme scheme{kind, step_dt};
      for (int i = 0; i < n; ++i) step(e, sys.ctx, MagneticFieldSpec{}, scheme);
      return e;
    };
    const auto ref = run(SplitKind::Strang, dt / 64.0);
    for (const auto kind : {SplitKind::Lie, SplitKind::Strang}) {
      const auto got = run(kind, dt);
      std::vector<double> dx(got.size()), dv(got.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        dx[i] = oracle::periodic_diff(got.x[0][i], ref.x[0][i], sc.hi[0] - sc.lo[0]);
        dv[i] = got.v[0][i] - ref.v[0][i];
      }
      const double err = std::sqrt(oracle::rms(dx) * oracle::rms(dx) +
                                   oracle::rms(dv) * oracle::rms(dv));
      (kind == SplitKind::Lie ? err_lie : err_strang).push_back(err);
    }
  }
  const double slope_lie = oracle::fit_slope(dts, err_lie);
  const double slope_strang = oracle::fit_slope(dts, err_strang);
  CHECK(slope_lie > 0.7);
  CHECK(slope_lie < 1.3);
  CHECK(slope_strang > 1.7);
  CHECK(slope_strang < 2.3);
}

TEST_CASE("strang step is time symmetric") {
  const ScenarioSpec sc = small_landau(200, 5);
  System sys(sc, 32);
  auto e = sample_landau(sc);
  const auto x0 = e.x[0];
  const auto v0 = e.v[0];
  const SplittingScheme fwd{SplitKind::Strang, 0.05};
  const SplittingScheme bwd{SplitKind::Strang, -0.05};
  step(e, sys.ctx, MagneticFieldSpec{}, fwd);
  step(e, sys.ctx, MagneticFieldSpec{}, bwd);
  const double L = sc.hi[0] - sc.lo[0];
  for (std::size_t i = 0; i < e.size(); ++i) {
    CHECK(std::abs(oracle::periodic_diff(e.x[0][i], x0[i], L)) <=
          1e-10 * std::max(1.0, std::abs(x0[i])));
    CHECK(std::abs(e.v[0][i] - v0[i]) <= 1e-10 * std::max(1.0, std::abs(v0[i])));
  }
}

TEST_CASE("charge is bit-exact over composed steps") {
  const ScenarioSpec sc = small_landau(300, 6);
  System sys(sc, 32);
  auto e = sample_landau(sc);
  const double c0 = total_charge(e);
  const auto w0 = e.w;
  const SplittingScheme scheme{SplitKind::Strang, 0.05};
  for (int n = 0; n < 200; ++n) step(e, sys.ctx, MagneticFieldSpec{}, scheme);
  CHECK(e.w == w0);
  CHECK(total_charge(e) == c0);
}

#ifdef _OPENMP
TEST_CASE("steps are bit-identical across thread counts") {
  const ScenarioSpec sc = small_landau(2000, 9);
  const SplittingScheme scheme{SplitKind::Strang, 0.05};
  auto run = [&](int threads) {
    omp_set_num_threads(threads);
    System sys(sc, 32);
    auto e = sample_landau(sc);
    for (int n = 0; n < 5; ++n) step(e, sys.ctx, MagneticFieldSpec{}, scheme);
    return e;
  };
  const auto a = run(2);
  const auto b = run(1);
  CHECK(a.x[0] == b.x[0]);
  CHECK(a.v[0] == b.v[0]);
  omp_set_num_threads(2);
}
#endif
