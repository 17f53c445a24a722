#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>

#include "hpic/reference.hpp"
#include "hpic/reduce.hpp"
#include "hpic/rng.hpp"
#include "hpic/runner.hpp"
#include "oracles.hpp"

using namespace hpic;

namespace {

FemSpace periodic_1d(int n) {
  return build_space(1, {0.0, 0.0}, {4.0 * M_PI, 1.0}, {n, 1}, 1,
                     BoundaryCondition::Periodic);
}

ParticleEnsemble random_ensemble(const FemSpace& space, std::size_t np, std::uint64_t seed) {
  ParticleEnsemble e;
  e.dim = space.dim;
  e.resize(np);
  Rng rng(seed);
  for (std::size_t s = 0; s < np; ++s) {
    for (int a = 0; a < space.dim; ++a) e.x[a][s] = space.lo[a] + rng.u01() * space.length(a);
    for (int c = 0; c < 3; ++c) e.v[c][s] = rng.normal();
    e.w[s] = 0.5 + rng.u01();
  }
  return e;
}

}  // namespace

TEST_CASE("omp deposit agrees with the serial reference") {
  const FemSpace s = periodic_1d(64);
  const auto e = random_ensemble(s, 30000, 1);
  for (const auto kernel :
       {SmoothingKernel{}, SmoothingKernel{KernelShape::BSpline, 1, s.h[0]}}) {
    const auto F_omp = deposit(e, kernel, s, 0.25);
    const auto F_ref = ref::deposit(e, kernel, s, 0.25);
    double scale = 0.0;
    for (const double f : F_ref) scale = std::max(scale, std::abs(f));
    for (std::size_t i = 0; i < F_ref.size(); ++i) {
      CHECK(std::abs(F_omp[i] - F_ref[i]) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("omp push is bit-identical to the serial reference") {
  const FemSpace s = periodic_1d(32);
  MagneticFieldSpec f;
  f.B = {0.2, -0.4, 0.9};
  f.scale_x = 2.0;
  f.scale_B = 3.0;
  auto a = random_ensemble(s, 5000, 2);
  auto b = a;
  flow_hv(a, &s, f, 0.05);
  ref::flow_hv(b, &s, f, 0.05);
  CHECK(a.x[0] == b.x[0]);
  CHECK(a.x[1] == b.x[1]);
  CHECK(a.v[0] == b.v[0]);
  CHECK(a.v[1] == b.v[1]);
  CHECK(a.v[2] == b.v[2]);
}

TEST_CASE("omp kick is bit-identical to the serial reference") {
  const FemSpace s = periodic_1d(32);
  auto a = random_ensemble(s, 5000, 3);
  auto b = a;
  Rng rng(4);
  std::vector<double> phi(32);
  for (auto& p : phi) p = rng.normal();
  apply_field_kick(a, s, phi, 0.05, 1.5, OutOfDomainPolicy::Error);
  ref::apply_field_kick(b, s, phi, 0.05, 1.5, OutOfDomainPolicy::Error);
  CHECK(a.v[0] == b.v[0]);
}

TEST_CASE("spmv row-parallel equals serial") {
  const FemSpace s = periodic_1d(128);
  const SparseMatrix M = assemble_stiffness(s);
  Rng rng(5);
  std::vector<double> x(128), y1(128), y2(128);
  for (auto& v : x) v = rng.normal();
  M.multiply(x.data(), y1.data());
  ref::spmv(M, x.data(), y2.data());
  CHECK(y1 == y2);
}

TEST_CASE("deterministic moments match serial reference within rounding") {
  const FemSpace s = periodic_1d(32);
  const auto e = random_ensemble(s, 100000, 6);
  CHECK(total_charge(e) == doctest::Approx(ref::total_charge(e)).epsilon(1e-13));
  CHECK(kinetic_energy(e) == doctest::Approx(ref::kinetic_energy(e)).epsilon(1e-13));
}

TEST_CASE("kahan-compensated blocks beat naive summation") {
  // alternating large/small terms whose naive sum loses low bits
  const std::size_t n = 1 << 16;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = (i % 2 == 0) ? 1.0e16 : 1.0;
    if (i % 4 == 2) v[i] = -1.0e16;
  }
  // exact: n/4 * 1.0e16 pairs cancel... construct exact value directly
  long double exact = 0.0L;
  for (const double x : v) exact += static_cast<long double>(x);
  const double det = det_sum(v);
  CHECK(std::abs(det - static_cast<double>(exact)) <= 1.0);
}

#ifdef _OPENMP
TEST_CASE("bench speedup table: push scales monotonically (5% jitter)") {
  if (omp_get_num_procs() < 2) return;
  RunConfig cfg = parse_config_text(
      "scenario = landau\nnp = 400000\nsampling = stratified\n[run]\ndt = 0.05\n");
  // best of three to ride out scheduler jitter on shared machines
  double best = 0.0;
  std::vector<BenchRow> rows;
  for (int rep = 0; rep < 3; ++rep) {
    rows = bench_speedup(cfg, {1, 2}, 1, 4);
    REQUIRE(rows.size() >= 3);
    best = std::max(best, rows[1].speedup_push);
    if (best >= 0.95) break;
  }
  CHECK(rows[0].threads == 1);
  CHECK(rows[1].threads == 2);
  CHECK(best >= 0.95);  // non-strict monotone up to the core count
  // the serial reference row exists and reports sensible timings
  CHECK(rows.back().impl == "serial");
  CHECK(rows.back().push_ms > 0.0);
  // table serializes
  const std::string table = bench_table_csv(rows);
  CHECK(table.find("impl,threads") == 0);
}
#endif
