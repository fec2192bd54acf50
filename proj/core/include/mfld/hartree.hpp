#pragma once

#include <vector>

#include "mfld/grid.hpp"
#include "mfld/potential.hpp"

namespace mfld {

struct EvolveOptions {
  double norm_tolerance = 1e-8;
  double energy_tolerance = 1e-6;  // relative to max(1, |E0|)
  double mean_field_blowup_factor = 10.0;
};

struct HartreeTrajectory {
  GridSpec grid;
  Potential potential;
  double tau = 0;
  std::vector<double> times;
  std::vector<ComplexField> snapshots;
  double initial_energy = 0;

  // diagnostics collected during the run
  double max_norm_defect = 0;       // max_k | ||phi_k|| - 1 |
  double max_energy_drift = 0;      // max_k |E_k - E0| / max(1, |E0|)
  double mean_field_sup_initial = 0;
  double mean_field_sup_max = 0;
  std::vector<double> h2_norms;
  double h2_growth_rate = 0;        // least-squares slope of log ||phi||_H2 vs t

  std::size_t index_of(double t) const;  // exact trajectory time, else parameter_error
  const ComplexField& at_time(double t) const;
};

// <phi,-Delta phi> + 1/2 <phi,(v*|phi|^2) phi>
double hartree_energy(const ComplexField& phi, const Potential& v);

// One Strang step: half kinetic, nonlinear phase from the mid-step density,
// half kinetic.
ComplexField hartree_step(const ComplexField& phi, const Potential& v, double tau);

HartreeTrajectory evolve_hartree(const ComplexField& phi0, const Potential& v, double T,
                                 double tau, const EvolveOptions& opts = {});

// Richardson diagnostic: log2 of the step-halving error ratio at time T,
// observed convergence order of the splitting.
double hartree_observed_order(const ComplexField& phi0, const Potential& v, double T, double tau);

}  // namespace mfld
