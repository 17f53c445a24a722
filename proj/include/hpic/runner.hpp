#pragma once

#include <string>
#include <vector>

#include "hpic/config.hpp"

namespace hpic {

struct RunResult {
  DiagnosticsRecord diag;
  ParticleEnsemble final_state;
  // Mode analysis (2D runs with modes_every > 0): one row per sample.
  std::vector<double> mode_t;
  std::vector<std::vector<double>> mode_amp;  // [sample][l-1], l = 1..mode_max
  std::vector<double> mode5_arg;              // unwrapped arg of c_l for l = scenario.l
};

// Full fixed-step loop: sample, assemble, repeat {step, diagnostics,
// snapshots}, final snapshot. Writes CSV/snapshots when out_dir is set.
RunResult run_simulation(const RunConfig& cfg);

// CLI semantics on top of run_simulation: 0 ok, 2 config, 3 solver, 4 I/O.
int main_loop(const RunConfig& cfg);

struct BenchRow {
  std::string impl;  // "omp" or "serial"
  int threads = 1;
  double deposit_ms = 0.0;
  double push_ms = 0.0;
  double solve_ms = 0.0;
  double speedup_deposit = 1.0;
  double speedup_push = 1.0;
};

// Times the deposit / push / solve phases of a few steps at each thread
// count, plus the single-thread serial reference kernels.
std::vector<BenchRow> bench_speedup(const RunConfig& cfg,
                                    const std::vector<int>& thread_counts,
                                    int warmup_steps = 2, int timed_steps = 8);

std::string bench_table_csv(const std::vector<BenchRow>& rows);

}  // namespace hpic
