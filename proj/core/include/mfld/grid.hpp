#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "mfld/errors.hpp"

namespace mfld {

using cplx = std::complex<double>;

// Uniform periodic grid on [0,L)^d with M points per axis, d in {1,2}.
// Fields are sampled row-major: index = i0*M + i1 in 2d.
struct GridSpec {
  int dim = 1;
  int points = 4;    // M per axis, even, 4 <= M <= 1024
  double length = 1; // L

  GridSpec() = default;
  GridSpec(int dim_, int points_, double length_);

  double spacing() const { return length / points; }
  std::size_t size() const;       // M^d
  double cell_volume() const;     // h^d
  double volume() const;          // L^d

  bool operator==(const GridSpec&) const = default;

  // Signed integer mode for axis slot j in [0,M): j for j <= M/2, j-M above.
  int signed_mode(int j) const { return j <= points / 2 ? j : j - points; }
  // |kappa|^2 = sum_axis (2 pi k~/L)^2 for the flattened spectral slot.
  double mode_ksq(std::size_t flat) const;
  // Physical coordinate of axis slot i.
  double coordinate(int i) const { return spacing() * i; }
};

struct ComplexField {
  GridSpec grid;
  std::vector<cplx> values;

  ComplexField() = default;
  explicit ComplexField(const GridSpec& g) : grid(g), values(g.size()) {}
  ComplexField(const GridSpec& g, std::vector<cplx> v);

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
};

struct RealField {
  GridSpec grid;
  std::vector<double> values;

  RealField() = default;
  explicit RealField(const GridSpec& g) : grid(g), values(g.size()) {}
  RealField(const GridSpec& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  const double& operator[](std::size_t i) const { return values[i]; }
};

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

// h^d sum conj(a) b
cplx inner_product(const ComplexField& a, const ComplexField& b);
double l2_norm(const ComplexField& f);
void scale(ComplexField& f, cplx c);
void normalize(ComplexField& f);  // throws consistency_error on zero field
ComplexField axpy(cplx alpha, const ComplexField& x, const ComplexField& y);  // alpha*x + y

// Spectral coefficients c_k = F_k / M^d of the unnormalized forward DFT,
// so f(x_j) = sum_k c_k e^{i kappa_k . x_j} exactly on the grid.
std::vector<cplx> spectral_coefficients(const ComplexField& f);
ComplexField field_from_coefficients(const GridSpec& g, const std::vector<cplx>& coeff);

// (-Delta f): multiply spectral slot k by +|2 pi k~/L|^2.
ComplexField minus_laplacian(const ComplexField& f);
// exp(-i (-Delta) t) f: free Schroedinger flow, multiplier e^{-i |kappa|^2 t}.
ComplexField free_evolution(const ComplexField& f, double t);

// Periodic convolution (g * rho)(x) = h^d sum_y g(x-y) rho(y) via FFT.
RealField convolve(const RealField& g, const RealField& rho);
ComplexField convolve(const RealField& g, const ComplexField& rho);

// Sobolev norm ||f||_{H^m}, m in {0,1,2}: L^d sum (1+|kappa|^2)^m |c_k|^2, rooted.
double sobolev_norm(const ComplexField& f, int m);

}  // namespace mfld
