#include "mfld/potential.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "mfld/observable.hpp"

namespace mfld {
namespace {

// Fill the displacement table from a radial profile evaluated on the
// half-axis; mirrored indices share the identical value.
RealField tabulate_even(const GridSpec& g, const std::function<double(double)>& profile) {
  RealField out(g);
  int m = g.points;
  double h = g.spacing();
  if (g.dim == 1) {
    for (int j = 0; j <= m / 2; ++j) {
      double val = profile(h * j);
      out[j] = val;
      if (j != 0) out[(m - j) % m] = val;
    }
    return out;
  }
  for (int j0 = 0; j0 <= m / 2; ++j0) {
    for (int j1 = 0; j1 <= m / 2; ++j1) {
      double r = std::hypot(h * j0, h * j1);
      double val = profile(r);
      int i0m = (m - j0) % m;
      int i1m = (m - j1) % m;
      out[static_cast<std::size_t>(j0) * m + j1] = val;
      out[static_cast<std::size_t>(j0) * m + i1m] = val;
      out[static_cast<std::size_t>(i0m) * m + j1] = val;
      out[static_cast<std::size_t>(i0m) * m + i1m] = val;
    }
  }
  return out;
}

}  // namespace

Potential Potential::zero_potential(const GridSpec& g) {
  Potential v;
  v.kind = PotentialKind::zero;
  v.table = RealField(g);
  return v;
}

Potential Potential::gaussian(const GridSpec& g, double amplitude, double width) {
  if (!(width > 0)) throw parameter_error("Potential::gaussian: width must be positive");
  Potential v;
  v.kind = PotentialKind::gaussian;
  v.amplitude = amplitude;
  v.width = width;
  v.table = tabulate_even(g, [&](double r) { return amplitude * std::exp(-r * r / (2 * width * width)); });
  return v;
}

Potential Potential::soft_coulomb(const GridSpec& g, double amplitude, double regularizer) {
  if (!(regularizer > 0))
    throw parameter_error("Potential::soft_coulomb: regularizer must be positive");
  Potential v;
  v.kind = PotentialKind::soft_coulomb;
  v.amplitude = amplitude;
  v.regularizer = regularizer;
  v.table = tabulate_even(
      g, [&](double r) { return amplitude / std::sqrt(r * r + regularizer * regularizer); });
  return v;
}

Potential Potential::cosine(const GridSpec& g, double amplitude, int wavenumber) {
  Potential v;
  v.kind = PotentialKind::cosine;
  v.amplitude = amplitude;
  v.wavenumber = wavenumber;
  double unit = 2.0 * std::numbers::pi * wavenumber / g.length;
  if (g.dim == 1) {
    v.table = tabulate_even(g, [&](double r) { return amplitude * std::cos(unit * r); });
  } else {
    // separable product cos(kx) cos(ky); tabulate_even's radial profile does
    // not apply, so mirror explicitly per axis
    RealField out(g);
    int m = g.points;
    double h = g.spacing();
    std::vector<double> axis(m);
    for (int j = 0; j <= m / 2; ++j) {
      double val = std::cos(unit * h * j);
      axis[j] = val;
      if (j != 0) axis[(m - j) % m] = val;
    }
    for (int j0 = 0; j0 < m; ++j0)
      for (int j1 = 0; j1 < m; ++j1)
        out[static_cast<std::size_t>(j0) * m + j1] = amplitude * axis[j0] * axis[j1];
    v.table = std::move(out);
  }
  return v;
}

Potential Potential::constant(const GridSpec& g, double c) { return cosine(g, c, 0); }

double Potential::at_displacement(std::size_t i, std::size_t j) const {
  const GridSpec& g = table.grid;
  int m = g.points;
  if (g.dim == 1) {
    int d = (static_cast<int>(i) - static_cast<int>(j)) % m;
    if (d < 0) d += m;
    return table[d];
  }
  int i0 = static_cast<int>(i) / m, i1 = static_cast<int>(i) % m;
  int j0 = static_cast<int>(j) / m, j1 = static_cast<int>(j) % m;
  int d0 = (i0 - j0) % m;
  if (d0 < 0) d0 += m;
  int d1 = (i1 - j1) % m;
  if (d1 < 0) d1 += m;
  return table[static_cast<std::size_t>(d0) * m + d1];
}

double potential_bound_constant(const Potential& v, const GridSpec& g) {
  require_same_grid(v.grid(), g, "potential_bound_constant");
  if (v.is_zero()) return 0.0;
  std::size_t n = g.size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = v.table[i] * v.table[i];
  // (1-Delta)^{-1/2} Mult(v^2) (1-Delta)^{-1/2}
  m = sobolev_multiplier_left(g, m, -0.5);
  m = sobolev_multiplier_left(g, m.adjoint(), -0.5).adjoint().eval();
  Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

RealField mean_field_potential(const Potential& v, const ComplexField& phi) {
  require_same_grid(v.grid(), phi.grid, "mean_field_potential");
  RealField rho(phi.grid);
  for (std::size_t i = 0; i < phi.size(); ++i) rho[i] = std::norm(phi[i]);
  return convolve(v.table, rho);
}

}  // namespace mfld
