#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mfld/hartree.hpp"
#include "mfld/observable.hpp"

namespace mfld {

// K1[x,y] = h^d v(x-y) phi(x) conj(phi(y)),  K2[x,y] = h^d v(x-y) phi(x) phi(y);
// quadrature weight folded in so matrix-vector products realize the
// integral operators on sample vectors.
struct KernelPair {
  Eigen::MatrixXcd k1;
  Eigen::MatrixXcd k2;
  double hs_norm_k1 = 0;
  double hs_norm_k2 = 0;
};

KernelPair build_kernels(const ComplexField& phi_s, const Potential& v);

// q g = g - <phi,g> phi
ComplexField project_out(const ComplexField& phi, const ComplexField& g);

// -i [ h_H(s) f + q K1 q f - q K2 conj(f) ], the backward generator. The
// pair term projects the output only; see the note in fluctuation.cpp.
// check_orthogonality enforces the <phi_s,f> = 0 precondition (1e-6).
ComplexField rhs_backward(const ComplexField& f, const ComplexField& phi_s,
                          const KernelPair& kernels, const Potential& v,
                          bool check_orthogonality = true);

// Same generator with kernels applied as phi * (v * (conj(phi) f)) style
// convolutions; no matrices materialized. Used by the solver.
ComplexField rhs_backward_fast(const ComplexField& f, const ComplexField& phi_s,
                               const Potential& v);

struct FluctuationSolution {
  double observation_time = 0;
  double terminal_variance = 0;  // ||f_{t;t}||^2
  double sigma2 = 0;             // ||f_{0;t}||^2
  std::vector<double> times;     // ascending s_k
  std::vector<double> norms;     // ||f_{s_k;t}||
  std::vector<double> orthogonality_defects;
  std::vector<ComplexField> fields;
  double max_orthogonality_defect = 0;
  double growth_rate = 0;  // smallest C with log||f_s|| - log||f_t|| <= C (t-s)
  ComplexField terminal_field;
  ComplexField initial_field;
};

// Integrate i d_s f = (h_H + K1~ - K2~ J) f from s=t down to 0, terminal
// datum f_{t;t} = q_t O phi_t; classical RK4 on the doubled real system.
// rk_stride: RK step = rk_stride * trajectory tau. stride 1 interpolates
// phi at stage midpoints; even strides land stages on stored snapshots.
FluctuationSolution solve_backward(const HartreeTrajectory& traj, const Observable& o, double t,
                                   int rk_stride = 1);

std::vector<std::pair<double, double>> variance_curve(const HartreeTrajectory& traj,
                                                      const Observable& o,
                                                      const std::vector<double>& times);

}  // namespace mfld
