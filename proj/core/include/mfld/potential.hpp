#pragma once

#include "mfld/grid.hpp"

namespace mfld {

enum class PotentialKind { zero, gaussian, soft_coulomb, cosine };

// Pair interaction v tabulated at grid displacements with periodic wrap.
// Tables are filled by mirroring the half-axis so v(-x) = v(x) exactly.
struct Potential {
  PotentialKind kind = PotentialKind::zero;
  double amplitude = 0;
  double width = 0;        // gaussian
  double regularizer = 0;  // soft-coulomb
  int wavenumber = 0;      // cosine
  RealField table;

  static Potential zero_potential(const GridSpec& g);
  // amplitude * exp(-r^2 / (2 width^2)), r the periodic distance
  static Potential gaussian(const GridSpec& g, double amplitude, double width);
  // amplitude / sqrt(r^2 + regularizer^2), regularizer > 0
  static Potential soft_coulomb(const GridSpec& g, double amplitude, double regularizer);
  // d=1: amplitude * cos(2 pi k0 x / L); d=2: product over axes
  static Potential cosine(const GridSpec& g, double amplitude, int wavenumber);
  // constant c everywhere (cosine with k0 = 0)
  static Potential constant(const GridSpec& g, double c);

  const GridSpec& grid() const { return table.grid; }
  bool is_zero() const { return kind == PotentialKind::zero; }
  // v evaluated at the displacement (site i) - (site j), flat indices
  double at_displacement(std::size_t i, std::size_t j) const;
};

// Smallest C with v^2 <= C (1 - Delta) on the grid: top eigenvalue of
// (1-Delta)^{-1/2} Mult(v^2) (1-Delta)^{-1/2}.
double potential_bound_constant(const Potential& v, const GridSpec& g);

// (v * |phi|^2)(x), the Hartree mean-field potential.
RealField mean_field_potential(const Potential& v, const ComplexField& phi);

}  // namespace mfld
