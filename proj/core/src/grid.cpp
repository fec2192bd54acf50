#include "mfld/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mfld/fourier.hpp"

namespace mfld {

GridSpec::GridSpec(int dim_, int points_, double length_)
    : dim(dim_), points(points_), length(length_) {
  if (dim != 1 && dim != 2)
    throw parameter_error("GridSpec: dim must be 1 or 2, got " + std::to_string(dim));
  if (points < 4 || points > 1024 || points % 2 != 0)
    throw parameter_error("GridSpec: points must be even and in [4,1024], got " +
                          std::to_string(points));
  if (!(length > 0))
    throw parameter_error("GridSpec: length must be positive");
}

std::size_t GridSpec::size() const {
  std::size_t n = static_cast<std::size_t>(points);
  return dim == 1 ? n : n * n;
}

double GridSpec::cell_volume() const {
  double h = spacing();
  return dim == 1 ? h : h * h;
}

double GridSpec::volume() const {
  return dim == 1 ? length : length * length;
}

double GridSpec::mode_ksq(std::size_t flat) const {
  double unit = 2.0 * std::numbers::pi / length;
  if (dim == 1) {
    double k = unit * signed_mode(static_cast<int>(flat));
    return k * k;
  }
  int i0 = static_cast<int>(flat) / points;
  int i1 = static_cast<int>(flat) % points;
  double k0 = unit * signed_mode(i0);
  double k1 = unit * signed_mode(i1);
  return k0 * k0 + k1 * k1;
}

ComplexField::ComplexField(const GridSpec& g, std::vector<cplx> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw grid_mismatch_error("ComplexField: value count does not match grid size");
}

RealField::RealField(const GridSpec& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw grid_mismatch_error("RealField: value count does not match grid size");
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (!(a == b))
    throw grid_mismatch_error(std::string(where) + ": fields live on different grids");
}

cplx inner_product(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid, b.grid, "inner_product");
  cplx acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc * a.grid.cell_volume();
}

double l2_norm(const ComplexField& f) {
  double acc = 0;
  for (const cplx& z : f.values) acc += std::norm(z);
  return std::sqrt(acc * f.grid.cell_volume());
}

void scale(ComplexField& f, cplx c) {
  for (cplx& z : f.values) z *= c;
}

void normalize(ComplexField& f) {
  double n = l2_norm(f);
  if (!(n > 0)) throw consistency_error("normalize: zero field");
  scale(f, 1.0 / n);
}

ComplexField axpy(cplx alpha, const ComplexField& x, const ComplexField& y) {
  require_same_grid(x.grid, y.grid, "axpy");
  ComplexField out(x.grid);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = alpha * x[i] + y[i];
  return out;
}

std::vector<cplx> spectral_coefficients(const ComplexField& f) {
  std::vector<cplx> coeff(f.size());
  fft::forward(f.grid, f.values.data(), coeff.data());
  double inv = 1.0 / static_cast<double>(f.grid.size());
  for (cplx& c : coeff) c *= inv;
  return coeff;
}

ComplexField field_from_coefficients(const GridSpec& g, const std::vector<cplx>& coeff) {
  if (coeff.size() != g.size())
    throw grid_mismatch_error("field_from_coefficients: coefficient count mismatch");
  ComplexField out(g);
  fft::inverse(g, coeff.data(), out.values.data());
  return out;
}

ComplexField minus_laplacian(const ComplexField& f) {
  std::vector<cplx> hat(f.size());
  fft::forward(f.grid, f.values.data(), hat.data());
  double inv = 1.0 / static_cast<double>(f.grid.size());
  for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= f.grid.mode_ksq(k) * inv;
  ComplexField out(f.grid);
  fft::inverse(f.grid, hat.data(), out.values.data());
  return out;
}

ComplexField free_evolution(const ComplexField& f, double t) {
  std::vector<cplx> hat(f.size());
  fft::forward(f.grid, f.values.data(), hat.data());
  double inv = 1.0 / static_cast<double>(f.grid.size());
  for (std::size_t k = 0; k < hat.size(); ++k) {
    double phase = -f.grid.mode_ksq(k) * t;
    hat[k] *= std::polar(inv, phase);
  }
  ComplexField out(f.grid);
  fft::inverse(f.grid, hat.data(), out.values.data());
  return out;
}

RealField convolve(const RealField& g, const RealField& rho) {
  require_same_grid(g.grid, rho.grid, "convolve");
  std::size_t n = g.size();
  std::vector<cplx> ga(n), rb(n);
  for (std::size_t i = 0; i < n; ++i) {
    ga[i] = g[i];
    rb[i] = rho[i];
  }
  fft::forward(g.grid, ga.data(), ga.data());
  fft::forward(g.grid, rb.data(), rb.data());
  for (std::size_t i = 0; i < n; ++i) ga[i] *= rb[i];
  fft::inverse(g.grid, ga.data(), ga.data());
  double s = g.grid.cell_volume() / static_cast<double>(n);
  RealField out(g.grid);
  for (std::size_t i = 0; i < n; ++i) out[i] = ga[i].real() * s;
  return out;
}

ComplexField convolve(const RealField& g, const ComplexField& rho) {
  require_same_grid(g.grid, rho.grid, "convolve");
  std::size_t n = g.size();
  std::vector<cplx> ga(n);
  for (std::size_t i = 0; i < n; ++i) ga[i] = g[i];
  fft::forward(g.grid, ga.data(), ga.data());
  ComplexField out(g.grid);
  fft::forward(g.grid, rho.values.data(), out.values.data());
  for (std::size_t i = 0; i < n; ++i) out[i] *= ga[i];
  fft::inverse(g.grid, out.values.data(), out.values.data());
  double s = g.grid.cell_volume() / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] *= s;
  return out;
}

double sobolev_norm(const ComplexField& f, int m) {
  if (m < 0 || m > 2)
    throw parameter_error("sobolev_norm: order must be 0, 1 or 2, got " + std::to_string(m));
  std::vector<cplx> coeff = spectral_coefficients(f);
  double acc = 0;
  for (std::size_t k = 0; k < coeff.size(); ++k) {
    double w = 1.0 + f.grid.mode_ksq(k);
    double wm = m == 0 ? 1.0 : (m == 1 ? w : w * w);
    acc += wm * std::norm(coeff[k]);
  }
  return std::sqrt(acc * f.grid.volume());
}

}  // namespace mfld
