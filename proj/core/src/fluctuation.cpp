#include "mfld/fluctuation.hpp"

#include <cmath>
#include <string>

namespace mfld {

namespace {

constexpr double kOrthogonalityTol = 1e-6;

using VecMap = Eigen::Map<const Eigen::VectorXcd>;

ComplexField from_eigen(const GridSpec& g, const Eigen::VectorXcd& v) {
  ComplexField out(g);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i];
  return out;
}

ComplexField conj_field(const ComplexField& f) {
  ComplexField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::conj(f[i]);
  return out;
}

// -i [ (-Delta + v*|phi|^2) f + q K1 q f - q K2 conj(f) ] with the two
// kernel applications supplied by the caller.  The pair term projects the
// output only: the generator's b†b† coefficient is the kernel restricted to
// the excitation space slot-wise, and for f ⊥ phi the conjugate J f needs no
// input projection (J maps the complement of phi onto the complement of
// conj(phi), which K2 is paired against directly).  Projecting conj(f) as
// well would subtract a spurious <phi, conj f> component and detunes the
// squeezing channel at first order in v.
template <class ApplyK1, class ApplyK2>
ComplexField generator(const ComplexField& f, const ComplexField& phi, const Potential& v,
                       ApplyK1&& apply_k1, ApplyK2&& apply_k2) {
  ComplexField out = minus_laplacian(f);
  RealField mf = mean_field_potential(v, phi);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] += mf[i] * f[i];

  ComplexField qf = project_out(phi, f);
  ComplexField k1 = apply_k1(qf);
  out = axpy(1.0, project_out(phi, k1), out);

  ComplexField k2 = apply_k2(conj_field(f));
  out = axpy(-1.0, project_out(phi, k2), out);

  scale(out, cplx(0, -1));
  return out;
}

}  // namespace

KernelPair build_kernels(const ComplexField& phi_s, const Potential& v) {
  require_same_grid(phi_s.grid, v.grid(), "build_kernels");
  std::size_t n = phi_s.size();
  double hd = phi_s.grid.cell_volume();
  KernelPair kp;
  kp.k1.resize(n, n);
  kp.k2.resize(n, n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      double vxy = hd * v.at_displacement(x, y);
      kp.k1(x, y) = vxy * phi_s[x] * std::conj(phi_s[y]);
      kp.k2(x, y) = vxy * phi_s[x] * phi_s[y];
    }
  }
  kp.hs_norm_k1 = kp.k1.norm();
  kp.hs_norm_k2 = kp.k2.norm();
  return kp;
}

ComplexField project_out(const ComplexField& phi, const ComplexField& g) {
  require_same_grid(phi.grid, g.grid, "project_out");
  if (std::abs(l2_norm(phi) - 1.0) > 1e-8)
    throw parameter_error("project_out: phi must be normalized");
  cplx c = inner_product(phi, g);
  return axpy(-c, phi, g);
}

ComplexField rhs_backward(const ComplexField& f, const ComplexField& phi_s,
                          const KernelPair& kernels, const Potential& v,
                          bool check_orthogonality) {
  require_same_grid(f.grid, phi_s.grid, "rhs_backward");
  if (check_orthogonality) {
    double defect = std::abs(inner_product(phi_s, f));
    if (defect > kOrthogonalityTol)
      throw parameter_error("rhs_backward: <phi_s,f> defect " + std::to_string(defect) +
                            " violates the orthogonality precondition");
  }
  auto k1 = [&](const ComplexField& g) {
    VecMap gv(g.values.data(), g.size());
    return from_eigen(g.grid, Eigen::VectorXcd(kernels.k1 * gv));
  };
  auto k2 = [&](const ComplexField& g) {
    VecMap gv(g.values.data(), g.size());
    return from_eigen(g.grid, Eigen::VectorXcd(kernels.k2 * gv));
  };
  return generator(f, phi_s, v, k1, k2);
}

ComplexField rhs_backward_fast(const ComplexField& f, const ComplexField& phi_s,
                               const Potential& v) {
  require_same_grid(f.grid, phi_s.grid, "rhs_backward_fast");
  auto k1 = [&](const ComplexField& g) {
    ComplexField dens(g.grid);
    for (std::size_t i = 0; i < g.size(); ++i) dens[i] = std::conj(phi_s[i]) * g[i];
    ComplexField conv = convolve(v.table, dens);
    for (std::size_t i = 0; i < conv.size(); ++i) conv[i] *= phi_s[i];
    return conv;
  };
  auto k2 = [&](const ComplexField& g) {
    ComplexField dens(g.grid);
    for (std::size_t i = 0; i < g.size(); ++i) dens[i] = phi_s[i] * g[i];
    ComplexField conv = convolve(v.table, dens);
    for (std::size_t i = 0; i < conv.size(); ++i) conv[i] *= phi_s[i];
    return conv;
  };
  return generator(f, phi_s, v, k1, k2);
}

FluctuationSolution solve_backward(const HartreeTrajectory& traj, const Observable& o, double t,
                                   int rk_stride) {
  require_same_grid(traj.grid, o.grid(), "solve_backward");
  if (rk_stride < 1) throw parameter_error("solve_backward: rk_stride must be >= 1");
  if (rk_stride > 1 && rk_stride % 2 != 0)
    throw parameter_error("solve_backward: rk_stride must be 1 or even");
  std::size_t t_idx = traj.index_of(t);
  if (t_idx % static_cast<std::size_t>(rk_stride) != 0)
    throw parameter_error("solve_backward: rk_stride must divide the index of t");
  const Potential& v = traj.potential;

  const ComplexField& phi_t = traj.snapshots[t_idx];
  ComplexField f = project_out(phi_t, o.apply(phi_t));

  std::size_t stored = t_idx / rk_stride + 1;
  FluctuationSolution sol;
  sol.observation_time = t;
  sol.terminal_field = f;
  sol.terminal_variance = l2_norm(f) * l2_norm(f);
  sol.times.resize(stored);
  sol.norms.resize(stored);
  sol.orthogonality_defects.resize(stored);
  sol.fields.resize(stored);

  auto record = [&](std::size_t slot, std::size_t snap_idx) {
    sol.times[slot] = traj.times[snap_idx];
    sol.norms[slot] = l2_norm(f);
    sol.orthogonality_defects[slot] = std::abs(inner_product(traj.snapshots[snap_idx], f));
    sol.fields[slot] = f;
    sol.max_orthogonality_defect =
        std::max(sol.max_orthogonality_defect, sol.orthogonality_defects[slot]);
    if (sol.orthogonality_defects[slot] > kOrthogonalityTol)
      throw propagation_error("solve_backward: orthogonality defect " +
                              std::to_string(sol.orthogonality_defects[slot]) + " at s = " +
                              std::to_string(sol.times[slot]) + "; use a smaller tau");
  };

  record(stored - 1, t_idx);
  double h = -traj.tau * rk_stride;  // backward step
  for (std::size_t k = t_idx; k > 0; k -= rk_stride) {
    const ComplexField& phi_hi = traj.snapshots[k];
    const ComplexField& phi_lo = traj.snapshots[k - rk_stride];
    ComplexField phi_mid;
    if (rk_stride == 1) {
      phi_mid = axpy(1.0, phi_hi, phi_lo);
      scale(phi_mid, 0.5);
      normalize(phi_mid);
    } else {
      phi_mid = traj.snapshots[k - rk_stride / 2];
    }
    ComplexField k1 = rhs_backward_fast(f, phi_hi, v);
    ComplexField k2 = rhs_backward_fast(axpy(h / 2, k1, f), phi_mid, v);
    ComplexField k3 = rhs_backward_fast(axpy(h / 2, k2, f), phi_mid, v);
    ComplexField k4 = rhs_backward_fast(axpy(h, k3, f), phi_lo, v);
    ComplexField incr = k1;
    incr = axpy(2.0, k2, incr);
    incr = axpy(2.0, k3, incr);
    incr = axpy(1.0, k4, incr);
    f = axpy(h / 6, incr, f);
    record((k - rk_stride) / rk_stride, k - rk_stride);
  }

  sol.initial_field = f;
  sol.sigma2 = l2_norm(f) * l2_norm(f);

  double log_ft = std::log(sol.norms.back());
  double best = 0;
  for (std::size_t i = 0; i + 1 < sol.norms.size(); ++i) {
    double dt = t - sol.times[i];
    if (dt > 0 && sol.norms[i] > 0)
      best = std::max(best, (std::log(sol.norms[i]) - log_ft) / dt);
  }
  sol.growth_rate = best;
  return sol;
}

std::vector<std::pair<double, double>> variance_curve(const HartreeTrajectory& traj,
                                                      const Observable& o,
                                                      const std::vector<double>& times) {
  std::vector<std::pair<double, double>> out;
  out.reserve(times.size());
  for (double t : times) out.emplace_back(t, solve_backward(traj, o, t).sigma2);
  return out;
}

}  // namespace mfld
