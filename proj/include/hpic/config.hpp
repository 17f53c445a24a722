#pragma once

#include <string>

#include "hpic/diagnostics.hpp"
#include "hpic/integrators.hpp"
#include "hpic/scenarios.hpp"

namespace hpic {

// Fully resolved run description. parse_config applies per-scenario
// defaults so a file naming only the scenario is runnable.
struct RunConfig {
  ScenarioSpec scenario;

  SplittingScheme scheme{SplitKind::Strang, 0.01};
  double t_final = 30.0;

  // grid
  std::array<int, 2> cells{128, 1};
  int order = 1;
  BoundaryCondition bc = BoundaryCondition::Periodic;

  SmoothingKernel kernel;
  SolverConfig solver;
  OutOfDomainPolicy oob_policy = OutOfDomainPolicy::Error;

  // output cadence, in steps; 0 disables
  int diag_every = 1;
  int snapshot_every = 0;
  int grid_every = 0;
  int modes_every = 0;
  int mode_max = 8;
  std::array<int, 2> grid_size{256, 256};
  bool snapshot_binary = true;
  std::string out_dir;

  std::string dump_matrix_path;
  std::string dump_phi_path;

  int threads = 0;  // 0 keeps the runtime default
  bool deterministic_reduction = true;

  DampingFitOptions fit;

  int steps() const { return static_cast<int>(t_final / scheme.dt + 1e-9); }
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Serializes every key; parsing the result reproduces the config.
std::string echo_config(const RunConfig& cfg);

FemSpace make_space(const RunConfig& cfg);
MagneticFieldSpec make_field(const RunConfig& cfg);

}  // namespace hpic
