#include "hpic/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hpic/errors.hpp"
#include "hpic/io.hpp"
#include "hpic/reference.hpp"

namespace hpic {

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

std::string diag_row(double t, double ed, double h, double px, double py, double c) {
  return format_double(t) + "," + format_double(ed) + "," + format_double(h) + "," +
         format_double(px) + "," + format_double(py) + "," + format_double(c);
}

std::string snapshot_name(const std::string& dir, int step, bool binary) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06d", step);
  return dir + "/" + buf + (binary ? ".bin" : ".txt");
}

std::string grid_name(const std::string& dir, int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "density_%06d.dat", step);
  return dir + "/" + buf;
}

}  // namespace

RunResult run_simulation(const RunConfig& cfg) {
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif

  const FemSpace space = make_space(cfg);
  const SparseMatrix M = assemble_stiffness(space);
  const MagneticFieldSpec field = make_field(cfg);

  FieldContext ctx;
  ctx.space = &space;
  ctx.M = &M;
  ctx.kernel = cfg.kernel;
  ctx.rho0 = scenario_rho0(cfg.scenario);
  ctx.solver = cfg.solver;
  ctx.deposit_opts.policy = cfg.oob_policy;
  ctx.deposit_opts.deterministic = cfg.deterministic_reduction;

  RunResult res;
  res.final_state = sample_scenario(cfg.scenario);
  ParticleEnsemble& ens = res.final_state;
  wrap_positions(ens, space);

  auto& rec = res.diag;
  rec.scenario = scenario_name(cfg.scenario.kind);
  rec.scheme = cfg.scheme.kind == SplitKind::Lie ? "lie" : "strang";
  rec.dt = cfg.scheme.dt;
  rec.np = cfg.scenario.np;
  rec.n_cells = cfg.cells[0];
  rec.seed = cfg.scenario.seed;

  const bool writing = !cfg.out_dir.empty();
  if (writing) {
    ensure_directory(cfg.out_dir);
    std::ofstream echo(cfg.out_dir + "/config_echo.cfg");
    echo << echo_config(cfg);
  }
  if (!cfg.dump_matrix_path.empty()) {
    std::ofstream os(cfg.dump_matrix_path);
    M.write_triplets(os);
  }

  FieldCoefficients fc = solve_fields(ens, ctx);
  if (!cfg.dump_phi_path.empty()) {
    std::ofstream os(cfg.dump_phi_path);
    SparseMatrix::write_vector(os, fc.phi);
  }

  CsvWriter csv_out;
  CsvWriter modes_out;
  if (writing) csv_out.open_file(cfg.out_dir + "/diagnostics.csv", "t,E_d,H,Px,Py,C");
  const bool track_modes = cfg.scenario.dim() == 2 && cfg.modes_every > 0;
  if (writing && track_modes) {
    std::string header = "t";
    for (int l = 1; l <= cfg.mode_max; ++l) header += ",A" + std::to_string(l);
    header += ",arg_l";
    modes_out.open_file(cfg.out_dir + "/modes.csv", header);
  }

  double prev_arg = 0.0, unwrapped_arg = 0.0;
  bool have_arg = false;
  auto record_modes = [&](double t) {
    if (!track_modes) return;
    const auto c = mode_coefficients(ens, cfg.mode_max);
    const double c0 = c[0].real();
    std::vector<double> amps(static_cast<std::size_t>(cfg.mode_max));
    for (int l = 1; l <= cfg.mode_max; ++l) {
      amps[static_cast<std::size_t>(l - 1)] =
          c0 != 0.0 ? 2.0 * std::abs(c[static_cast<std::size_t>(l)]) / c0 : 0.0;
    }
    const int lsel = std::min(cfg.scenario.l, cfg.mode_max);
    const double arg = std::arg(c[static_cast<std::size_t>(lsel)]);
    if (!have_arg) {
      unwrapped_arg = arg;
      have_arg = true;
    } else {
      double d = arg - prev_arg;
      while (d > M_PI) d -= 2.0 * M_PI;
      while (d < -M_PI) d += 2.0 * M_PI;
      unwrapped_arg += d;
    }
    prev_arg = arg;
    res.mode_t.push_back(t);
    res.mode_amp.push_back(amps);
    res.mode5_arg.push_back(unwrapped_arg);
    if (writing) {
      std::string row = format_double(t);
      for (const double a : amps) row += "," + format_double(a);
      row += "," + format_double(unwrapped_arg);
      modes_out.write_row(row);
    }
  };

  auto record_diag = [&](double t) {
    const double ed = electric_energy(fc.phi, M);
    const double h = kinetic_energy(ens) + 0.5 * ed * ed;
    const auto p = total_momentum(ens);
    const double c = total_charge(ens);
    rec.append(t, ed, h, p[0], p[1], c);
    if (writing) csv_out.write_row(diag_row(t, ed, h, p[0], p[1], c));
  };

  record_diag(0.0);
  record_modes(0.0);
  if (writing && cfg.grid_every > 0) {
    GridSpec gs{cfg.grid_size[0], cfg.scenario.dim() == 2 ? cfg.grid_size[1] : 1,
                space.lo, space.hi};
    write_density_grid(grid_name(cfg.out_dir, 0), density_grid(ens, gs, 0.0));
  }

  const int nsteps = cfg.steps();
  int current_step = 0;
  try {
    for (int n = 1; n <= nsteps; ++n) {
      current_step = n;
      fc = step(ens, ctx, field, cfg.scheme);
      const double t = n * cfg.scheme.dt;
      if (n % cfg.diag_every == 0) record_diag(t);
      if (track_modes && n % cfg.modes_every == 0) record_modes(t);
      if (writing && cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0) {
        write_snapshot(snapshot_name(cfg.out_dir, n, cfg.snapshot_binary), ens, t,
                       cfg.snapshot_binary);
      }
      if (writing && cfg.grid_every > 0 && n % cfg.grid_every == 0) {
        GridSpec gs{cfg.grid_size[0], cfg.scenario.dim() == 2 ? cfg.grid_size[1] : 1,
                    space.lo, space.hi};
        write_density_grid(grid_name(cfg.out_dir, n), density_grid(ens, gs, t));
      }
    }
  } catch (const std::exception& err) {
    // Flush what we have, then rethrow with the failing step attached.
    csv_out.close();
    modes_out.close();
    throw SolverError("step " + std::to_string(current_step) + ": " + err.what());
  }

  if (writing) {
    write_snapshot(snapshot_name(cfg.out_dir, nsteps, cfg.snapshot_binary), ens,
                   nsteps * cfg.scheme.dt, cfg.snapshot_binary);
  }
  return res;
}

int main_loop(const RunConfig& cfg) {
  try {
    run_simulation(cfg);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

std::vector<BenchRow> bench_speedup(const RunConfig& cfg, const std::vector<int>& thread_counts,
                                    int warmup_steps, int timed_steps) {
  std::vector<int> counts = thread_counts;
  if (counts.empty() || counts.front() != 1) counts.insert(counts.begin(), 1);

  const FemSpace space = make_space(cfg);
  const SparseMatrix M = assemble_stiffness(space);
  const MagneticFieldSpec field = make_field(cfg);
  const double rho0 = scenario_rho0(cfg.scenario);

  std::vector<BenchRow> rows;
  double base_deposit = 0.0, base_push = 0.0;

  auto run_one = [&](bool serial_kernels, int threads) {
    BenchRow row;
    row.impl = serial_kernels ? "serial" : "omp";
    row.threads = threads;
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    ParticleEnsemble ens = sample_scenario(cfg.scenario);
    wrap_positions(ens, space);
    FieldContext ctx;
    ctx.space = &space;
    ctx.M = &M;
    ctx.kernel = cfg.kernel;
    ctx.rho0 = rho0;
    ctx.solver = cfg.solver;
    ctx.deposit_opts.policy = cfg.oob_policy;
    ctx.deposit_opts.deterministic = cfg.deterministic_reduction;

    const double dt = cfg.scheme.dt;
    double t_dep = 0.0, t_push = 0.0, t_solve = 0.0;
    for (int n = 0; n < warmup_steps + timed_steps; ++n) {
      const bool timed = n >= warmup_steps;
      double t0 = now_ms();
      if (serial_kernels) {
        ref::flow_hv(ens, &space, field, 0.5 * dt);
      } else {
        flow_hv(ens, &space, field, 0.5 * dt);
      }
      double t1 = now_ms();
      LoadVector F = serial_kernels
                         ? ref::deposit(ens, ctx.kernel, space, rho0, ctx.deposit_opts.policy)
                         : deposit(ens, ctx.kernel, space, rho0, ctx.deposit_opts, &ctx.ws);
      double t2 = now_ms();
      SolveOptions so;
      so.tol = ctx.solver.tol;
      so.max_iter = ctx.solver.max_iter;
      so.jacobi = ctx.solver.jacobi;
      if (ctx.solver.warm_start && ctx.warm_phi.size() == F.size()) {
        so.initial_guess = &ctx.warm_phi;
      }
      FieldCoefficients fc = solve_poisson(M, F, space, so);
      ctx.warm_phi = fc.phi;
      double t3 = now_ms();
      if (serial_kernels) {
        ref::apply_field_kick(ens, space, fc.phi, dt, field.scale_E, ctx.deposit_opts.policy);
        ref::flow_hv(ens, &space, field, 0.5 * dt);
      } else {
        apply_field_kick(ens, space, fc.phi, dt, field.scale_E, ctx.deposit_opts.policy);
        flow_hv(ens, &space, field, 0.5 * dt);
      }
      double t4 = now_ms();
      if (timed) {
        t_push += (t1 - t0) + (t4 - t3);
        t_dep += t2 - t1;
        t_solve += t3 - t2;
      }
    }
    row.deposit_ms = t_dep / timed_steps;
    row.push_ms = t_push / timed_steps;
    row.solve_ms = t_solve / timed_steps;
    return row;
  };

  for (const int tc : counts) {
    BenchRow row = run_one(false, tc);
    if (tc == 1) {
      base_deposit = row.deposit_ms;
      base_push = row.push_ms;
    }
    row.speedup_deposit = base_deposit > 0.0 ? base_deposit / row.deposit_ms : 1.0;
    row.speedup_push = base_push > 0.0 ? base_push / row.push_ms : 1.0;
    rows.push_back(row);
  }
  {
    BenchRow row = run_one(true, 1);
    row.speedup_deposit = base_deposit > 0.0 ? base_deposit / row.deposit_ms : 1.0;
    row.speedup_push = base_push > 0.0 ? base_push / row.push_ms : 1.0;
    rows.push_back(row);
  }
  return rows;
}

std::string bench_table_csv(const std::vector<BenchRow>& rows) {
  std::string out = "impl,threads,deposit_ms,push_ms,solve_ms,speedup_deposit,speedup_push\n";
  for (const auto& r : rows) {
    out += r.impl + "," + std::to_string(r.threads) + "," + format_double(r.deposit_ms) + "," +
           format_double(r.push_ms) + "," + format_double(r.solve_ms) + "," +
           format_double(r.speedup_deposit) + "," + format_double(r.speedup_push) + "\n";
  }
  return out;
}

}  // namespace hpic
