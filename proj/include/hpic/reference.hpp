#pragma once

#include <span>

#include "hpic/integrators.hpp"
#include "hpic/particles.hpp"

// Plain serial implementations of the hot kernels. They are the behavioral
// reference for the OpenMP versions (tests compare the two) and the baseline
// in the benchmark table.
namespace hpic::ref {

LoadVector deposit(const ParticleEnsemble& e, const SmoothingKernel& kernel,
                   const FemSpace& space, double rho0,
                   OutOfDomainPolicy policy = OutOfDomainPolicy::Error);

void flow_hv(ParticleEnsemble& e, const FemSpace* space,
             const MagneticFieldSpec& field, double dt);

void apply_field_kick(ParticleEnsemble& e, const FemSpace& space,
                      const std::vector<double>& phi, double dt, double kappa_E,
                      OutOfDomainPolicy policy);

double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

void spmv(const SparseMatrix& m, const double* x, double* y);

double total_charge(const ParticleEnsemble& e);
double kinetic_energy(const ParticleEnsemble& e);

}  // namespace hpic::ref
