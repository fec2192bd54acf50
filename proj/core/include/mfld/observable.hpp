#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "mfld/grid.hpp"

namespace mfld {

enum class ObservableKind { identity, multiplication, rank_one, general };

// Bounded self-adjoint one-particle operator as a dense Hermitian matrix
// acting on position samples. Operator norm, triple norm and the spectral
// decomposition are computed once at construction. Cheap to copy.
class Observable {
public:
  static Observable identity(const GridSpec& g);
  static Observable multiplication(RealField g);
  // |chi><chi| with the h^d quadrature weight folded in; chi normalized.
  static Observable rank_one(const ComplexField& chi);
  static Observable from_matrix(const GridSpec& g, Eigen::MatrixXcd m);
  // Two columns re,im; row-major entries of the full matrix.
  static Observable from_csv(const GridSpec& g, const std::string& path);

  ObservableKind kind() const;
  const GridSpec& grid() const;
  const Eigen::MatrixXcd& matrix() const;
  double op_norm() const;
  double triple_norm() const;
  const Eigen::VectorXd& eigenvalues() const;    // ascending
  const Eigen::MatrixXcd& eigenvectors() const;  // Euclidean-orthonormal columns

  ComplexField apply(const ComplexField& phi) const;

  struct Impl;  // defined in the implementation file

private:
  std::shared_ptr<const Impl> impl_;
  explicit Observable(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
};

// ||(1-Delta) A (1-Delta)^{-1}|| with the spectral Laplacian.
double triple_norm(const GridSpec& g, const Eigen::MatrixXcd& a);
double triple_norm(const Observable& o);

// Re <phi, A phi>; throws consistency_error when the imaginary part
// exceeds 1e-10 (Hermiticity drift).
double expectation(const Eigen::MatrixXcd& a, const ComplexField& phi);
double expectation(const Observable& o, const ComplexField& phi);
// <phi, O^2 phi> - <phi, O phi>^2
double variance(const Observable& o, const ComplexField& phi);

// Left-multiply by the Fourier multiplier (1+|kappa|^2)^p, columnwise FFT.
Eigen::MatrixXcd sobolev_multiplier_left(const GridSpec& g, const Eigen::MatrixXcd& a, double p);

}  // namespace mfld
