#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "mfld/grid.hpp"
#include "mfld/measure.hpp"
#include "mfld/observable.hpp"
#include "mfld/potential.hpp"

namespace mfld {

// Occupation-number basis of the N-particle, M-mode symmetric sector,
// ordered by descending occupation vectors (first state (N,0,...,0)).
class FockBasis {
public:
  FockBasis(int modes, int particles);

  int modes() const { return modes_; }
  int particles() const { return particles_; }
  std::size_t dimension() const { return flat_.size() / modes_; }
  const int* occupation(std::size_t idx) const { return flat_.data() + idx * modes_; }
  std::size_t index_of(const int* occ) const;

  // binomial(N+M-1, N); throws basis_size_error past the desk-scale cap
  static std::size_t dimension_for(int modes, int particles);

private:
  int modes_;
  int particles_;
  std::vector<int> flat_;
};

std::shared_ptr<const FockBasis> build_basis(int modes, int particles);

struct ManyBodyState {
  std::shared_ptr<const FockBasis> basis;
  Eigen::VectorXcd amplitudes;
};

// H = sum_pq h[p,q] a+_p a_q + (1/2N) sum_xy v(x-y) (n_x n_y - delta_xy n_x)
// acting sparsely on the Fock sector; h is the spectral Laplacian site
// matrix by default.
class SecondQuantizedHamiltonian {
public:
  SecondQuantizedHamiltonian(GridSpec grid, Potential v, Eigen::MatrixXcd one_body,
                             std::shared_ptr<const FockBasis> basis);

  const GridSpec& grid() const { return grid_; }
  const Potential& potential() const { return v_; }
  const Eigen::MatrixXcd& one_body() const { return one_body_; }
  const std::shared_ptr<const FockBasis>& basis() const { return basis_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& in) const;
  double energy(const ManyBodyState& psi) const;

private:
  GridSpec grid_;
  Potential v_;
  Eigen::MatrixXcd one_body_;
  std::shared_ptr<const FockBasis> basis_;
  std::vector<double> diagonal_;  // interaction + one-body diagonal per state
};

// Spectral-Laplacian one-body term restricted to the M-site grid (d=1).
Eigen::MatrixXcd site_laplacian_matrix(const GridSpec& g);

SecondQuantizedHamiltonian build_hamiltonian(const GridSpec& g, const Potential& v,
                                             int particles);
SecondQuantizedHamiltonian build_hamiltonian(const GridSpec& g, const Potential& v,
                                             Eigen::MatrixXcd one_body, int particles);

// psi = phi^{(x)N}: amplitude(n) = sqrt(N!/prod n_x!) prod u_x^{n_x} with
// u the l2-normalized site vector sqrt(h^d) phi.
ManyBodyState product_state(const ComplexField& phi, std::shared_ptr<const FockBasis> basis);

struct EvolveReport {
  std::size_t steps = 0;
  int max_subdivisions = 0;  // per-step halvings forced by the Krylov tolerance
  double norm_defect = 0;
  double energy_drift = 0;  // relative
};

// Krylov (Lanczos) propagation of e^{-iHT} in steps of tau (tau < 0 runs
// backward); subspace size 20, per-step tolerance 1e-10.
ManyBodyState evolve_exact(const ManyBodyState& psi, const SecondQuantizedHamiltonian& h,
                           double T, double tau, EvolveReport* report = nullptr);

// Exact law of O_N = N^{-1} dGamma(O) - mean_ref in state psi, via dense
// diagonalization of the sector matrix of dGamma(O). Dimension cap 5000;
// past it use observable_moments.
SpectralMeasure observable_statistics(const ManyBodyState& psi, const Observable& o,
                                      double mean_ref);

// Centered moments <psi, (N^{-1} dGamma(O) - mean_ref)^j psi>, j = 0..order,
// by repeated sparse application; order <= 4.
std::vector<double> observable_moments(const ManyBodyState& psi, const Observable& o,
                                       double mean_ref, int order);

// gamma[p,q] = <psi, a+_q a_p psi> / N, trace normalized to 1.
Eigen::MatrixXcd reduced_density(const ManyBodyState& psi);

}  // namespace mfld
