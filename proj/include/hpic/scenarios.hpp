#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "hpic/particles.hpp"

namespace hpic {

enum class ScenarioKind { Landau, TwoStream, BumpOnTail, Diocotron };

enum class SamplingMode { MonteCarlo, Stratified };

// Initial-condition description. Domain and velocity bounds are stored here
// fully resolved (config applies the per-variant defaults).
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Landau;
  std::uint64_t np = 100000;
  std::uint64_t seed = 1234;
  SamplingMode sampling = SamplingMode::MonteCarlo;

  // 1D variants
  double alpha = 0.001;
  double k = 0.5;
  double vmax = 6.0;

  // Diocotron
  int l = 5;
  double r_minus = 5.0;
  double r_plus = 8.0;
  double eps = 0.1;
  std::array<double, 3> b_ext{0.0, 0.0, 1.0};

  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};

  int dim() const { return kind == ScenarioKind::Diocotron ? 2 : 1; }
};

// Total charge of f0 over the stated domain: the 1D variants have unit-mean
// density, so C = |domain|; the diocotron normalizer is computed by
// quadrature of the ring density.
double scenario_total_charge(const ScenarioSpec& spec);

// Neutralizing background: C/|domain| for the periodic variants, 0 for the
// non-neutral diocotron column.
double scenario_rho0(const ScenarioSpec& spec);

ParticleEnsemble sample_landau(const ScenarioSpec& spec);
ParticleEnsemble sample_two_stream(const ScenarioSpec& spec);
ParticleEnsemble sample_bump_on_tail(const ScenarioSpec& spec);
ParticleEnsemble sample_diocotron(const ScenarioSpec& spec);

ParticleEnsemble sample_scenario(const ScenarioSpec& spec);

const char* scenario_name(ScenarioKind kind);

}  // namespace hpic
