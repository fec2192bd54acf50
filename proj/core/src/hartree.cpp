#include "mfld/hartree.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mfld {

namespace {

std::size_t step_count(double T, double tau, const char* where) {
  if (T < 0) throw parameter_error(std::string(where) + ": T must be non-negative");
  if (!(tau > 0)) throw parameter_error(std::string(where) + ": tau must be positive");
  if (T == 0) return 0;
  double ratio = T / tau;
  auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
    throw parameter_error(std::string(where) + ": tau must divide T");
  return steps;
}

double sup_abs(const RealField& f) {
  double m = 0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

// least-squares slope of y against t
double fitted_slope(const std::vector<double>& t, const std::vector<double>& y) {
  std::size_t n = t.size();
  if (n < 2) return 0;
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (t[i] - mt) * (y[i] - my);
    den += (t[i] - mt) * (t[i] - mt);
  }
  return den > 0 ? num / den : 0;
}

}  // namespace

std::size_t HartreeTrajectory::index_of(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  throw parameter_error("HartreeTrajectory: t = " + std::to_string(t) +
                        " is not a trajectory time");
}

const ComplexField& HartreeTrajectory::at_time(double t) const {
  return snapshots[index_of(t)];
}

double hartree_energy(const ComplexField& phi, const Potential& v) {
  if (std::abs(l2_norm(phi) - 1.0) > 1e-8)
    throw parameter_error("hartree_energy: field must be normalized");
  // kinetic part summed in Fourier space, exactly real
  std::vector<cplx> coeff = spectral_coefficients(phi);
  double kinetic = 0;
  for (std::size_t k = 0; k < coeff.size(); ++k)
    kinetic += phi.grid.mode_ksq(k) * std::norm(coeff[k]);
  kinetic *= phi.grid.volume();
  RealField mf = mean_field_potential(v, phi);
  double interaction = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) interaction += mf[i] * std::norm(phi[i]);
  interaction *= 0.5 * phi.grid.cell_volume();
  return kinetic + interaction;
}

ComplexField hartree_step(const ComplexField& phi, const Potential& v, double tau) {
  if (tau == 0) throw parameter_error("hartree_step: tau must be nonzero");
  ComplexField mid = free_evolution(phi, tau / 2);
  RealField mf = mean_field_potential(v, mid);
  for (std::size_t i = 0; i < mid.size(); ++i) mid[i] *= std::polar(1.0, -tau * mf[i]);
  return free_evolution(mid, tau / 2);
}

HartreeTrajectory evolve_hartree(const ComplexField& phi0, const Potential& v, double T,
                                 double tau, const EvolveOptions& opts) {
  require_same_grid(phi0.grid, v.grid(), "evolve_hartree");
  if (std::abs(l2_norm(phi0) - 1.0) > 1e-10)
    throw parameter_error("evolve_hartree: phi0 must be normalized to 1e-10");
  std::size_t steps = step_count(T, tau, "evolve_hartree");

  HartreeTrajectory traj;
  traj.grid = phi0.grid;
  traj.potential = v;
  traj.tau = tau;
  traj.times.reserve(steps + 1);
  traj.snapshots.reserve(steps + 1);
  traj.h2_norms.reserve(steps + 1);
  traj.initial_energy = hartree_energy(phi0, v);
  traj.mean_field_sup_initial = sup_abs(mean_field_potential(v, phi0));
  traj.mean_field_sup_max = traj.mean_field_sup_initial;

  double energy_scale = std::max(1.0, std::abs(traj.initial_energy));
  ComplexField phi = phi0;
  for (std::size_t k = 0; k <= steps; ++k) {
    double t = tau * static_cast<double>(k);
    if (k > 0) {
      phi = hartree_step(phi, v, tau);
      double norm_defect = std::abs(l2_norm(phi) - 1.0);
      traj.max_norm_defect = std::max(traj.max_norm_defect, norm_defect);
      if (norm_defect > opts.norm_tolerance)
        throw propagation_error("evolve_hartree: norm defect " + std::to_string(norm_defect) +
                                " at step " + std::to_string(k));
      double drift = std::abs(hartree_energy(phi, v) - traj.initial_energy) / energy_scale;
      traj.max_energy_drift = std::max(traj.max_energy_drift, drift);
      if (drift > opts.energy_tolerance)
        throw propagation_error("evolve_hartree: relative energy drift " + std::to_string(drift) +
                                " at step " + std::to_string(k));
      double sup = sup_abs(mean_field_potential(v, phi));
      traj.mean_field_sup_max = std::max(traj.mean_field_sup_max, sup);
      if (traj.mean_field_sup_initial > 0 &&
          sup > opts.mean_field_blowup_factor * traj.mean_field_sup_initial)
        throw propagation_error("evolve_hartree: mean-field sup norm grew past " +
                                std::to_string(opts.mean_field_blowup_factor) +
                                "x initial at step " + std::to_string(k));
    }
    traj.times.push_back(t);
    traj.snapshots.push_back(phi);
    traj.h2_norms.push_back(sobolev_norm(phi, 2));
  }

  std::vector<double> logs(traj.h2_norms.size());
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = std::log(traj.h2_norms[i]);
  traj.h2_growth_rate = fitted_slope(traj.times, logs);
  return traj;
}

double hartree_observed_order(const ComplexField& phi0, const Potential& v, double T,
                              double tau) {
  EvolveOptions loose;
  loose.energy_tolerance = 1.0;
  loose.norm_tolerance = 1e-6;
  ComplexField a = evolve_hartree(phi0, v, T, tau, loose).snapshots.back();
  ComplexField b = evolve_hartree(phi0, v, T, tau / 2, loose).snapshots.back();
  ComplexField c = evolve_hartree(phi0, v, T, tau / 4, loose).snapshots.back();
  double e1 = l2_norm(axpy(-1.0, b, a));
  double e2 = l2_norm(axpy(-1.0, c, b));
  if (!(e1 > 0) || !(e2 > 0)) return std::numeric_limits<double>::infinity();
  return std::log2(e1 / e2);
}

}  // namespace mfld
