#include "mfld/observable.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mfld/fourier.hpp"

namespace mfld {

namespace {

constexpr std::size_t kMatrixCap = 4096;

using VecMap = Eigen::Map<const Eigen::VectorXcd>;

void check_hermitian(const Eigen::MatrixXcd& m, double tol, const char* what) {
  double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (defect > tol)
    throw consistency_error(std::string(what) + ": matrix not Hermitian, defect " +
                            std::to_string(defect));
}

}  // namespace

struct Observable::Impl {
  ObservableKind kind = ObservableKind::general;
  GridSpec grid;
  Eigen::MatrixXcd matrix;
  double op_norm = 0;
  double triple = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};

Eigen::MatrixXcd sobolev_multiplier_left(const GridSpec& g, const Eigen::MatrixXcd& a, double p) {
  std::size_t n = g.size();
  if (static_cast<std::size_t>(a.rows()) != n || static_cast<std::size_t>(a.cols()) != n)
    throw grid_mismatch_error("sobolev_multiplier_left: matrix size does not match grid");
  std::vector<double> weight(n);
  for (std::size_t k = 0; k < n; ++k) weight[k] = std::pow(1.0 + g.mode_ksq(k), p);
  Eigen::MatrixXcd out(n, n);
  std::vector<cplx> col(n);
  double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
    fft::forward(g, col.data(), col.data());
    for (std::size_t k = 0; k < n; ++k) col[k] *= weight[k] * inv;
    fft::inverse(g, col.data(), col.data());
    for (std::size_t i = 0; i < n; ++i) out(i, j) = col[i];
  }
  return out;
}

double triple_norm(const GridSpec& g, const Eigen::MatrixXcd& a) {
  // (1-Delta) A (1-Delta)^{-1}; the right factor via the adjoint identity
  Eigen::MatrixXcd right = sobolev_multiplier_left(g, a.adjoint(), -1.0).adjoint();
  Eigen::MatrixXcd b = sobolev_multiplier_left(g, right, 1.0);
  Eigen::MatrixXcd gram = b.adjoint() * b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (gram + gram.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double triple_norm(const Observable& o) { return o.triple_norm(); }

namespace {

std::shared_ptr<Observable::Impl> finish_generic(std::shared_ptr<Observable::Impl> impl) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(impl->matrix);
  if (es.info() != Eigen::Success)
    throw consistency_error("Observable: eigendecomposition failed");
  impl->eigenvalues = es.eigenvalues();
  impl->eigenvectors = es.eigenvectors();
  impl->op_norm = impl->eigenvalues.cwiseAbs().maxCoeff();
  impl->triple = mfld::triple_norm(impl->grid, impl->matrix);
  return impl;
}

}  // namespace

Observable Observable::identity(const GridSpec& g) {
  auto impl = std::make_shared<Impl>();
  std::size_t n = g.size();
  if (n > kMatrixCap) throw parameter_error("Observable: grid too large for a dense matrix");
  impl->kind = ObservableKind::identity;
  impl->grid = g;
  impl->matrix = Eigen::MatrixXcd::Identity(n, n);
  impl->eigenvalues = Eigen::VectorXd::Ones(n);
  impl->eigenvectors = Eigen::MatrixXcd::Identity(n, n);
  impl->op_norm = 1.0;
  impl->triple = mfld::triple_norm(g, impl->matrix);
  return Observable(std::move(impl));
}

Observable Observable::multiplication(RealField g) {
  std::size_t n = g.size();
  if (n > kMatrixCap) throw parameter_error("Observable: grid too large for a dense matrix");
  auto impl = std::make_shared<Impl>();
  impl->kind = ObservableKind::multiplication;
  impl->grid = g.grid;
  impl->matrix = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) impl->matrix(i, i) = g[i];
  // diagonal case: spectrum is the sample list, sorted; ||O|| = max|g| exactly
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return g[a] < g[b]; });
  impl->eigenvalues.resize(n);
  impl->eigenvectors = Eigen::MatrixXcd::Zero(n, n);
  double mx = 0;
  for (std::size_t k = 0; k < n; ++k) {
    impl->eigenvalues[k] = g[order[k]];
    impl->eigenvectors(order[k], k) = 1.0;
    mx = std::max(mx, std::abs(g[k]));
  }
  impl->op_norm = mx;
  impl->triple = mfld::triple_norm(g.grid, impl->matrix);
  return Observable(std::move(impl));
}

Observable Observable::rank_one(const ComplexField& chi) {
  std::size_t n = chi.size();
  if (n > kMatrixCap) throw parameter_error("Observable: grid too large for a dense matrix");
  if (std::abs(l2_norm(chi) - 1.0) > 1e-8)
    throw parameter_error("Observable::rank_one: chi must be normalized");
  auto impl = std::make_shared<Impl>();
  impl->kind = ObservableKind::rank_one;
  impl->grid = chi.grid;
  double hd = chi.grid.cell_volume();
  impl->matrix.resize(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      impl->matrix(i, j) = hd * chi[i] * std::conj(chi[j]);
  return Observable(finish_generic(std::move(impl)));
}

Observable Observable::from_matrix(const GridSpec& g, Eigen::MatrixXcd m) {
  std::size_t n = g.size();
  if (n > kMatrixCap) throw parameter_error("Observable: grid too large for a dense matrix");
  if (static_cast<std::size_t>(m.rows()) != n || static_cast<std::size_t>(m.cols()) != n)
    throw grid_mismatch_error("Observable::from_matrix: matrix size does not match grid");
  check_hermitian(m, 1e-13, "Observable::from_matrix");
  auto impl = std::make_shared<Impl>();
  impl->kind = ObservableKind::general;
  impl->grid = g;
  impl->matrix = std::move(m);
  return Observable(finish_generic(std::move(impl)));
}

Observable Observable::from_csv(const GridSpec& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parameter_error("Observable::from_csv: cannot open " + path);
  std::size_t n = g.size();
  Eigen::MatrixXcd m(n, n);
  std::size_t count = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream row(line);
    double re, im;
    if (!(row >> re >> im)) {
      if (count == 0) continue;  // header line
      throw parameter_error("Observable::from_csv: malformed row in " + path);
    }
    if (count >= n * n)
      throw parameter_error("Observable::from_csv: too many rows in " + path);
    m(count / n, count % n) = cplx(re, im);
    ++count;
  }
  if (count != n * n)
    throw parameter_error("Observable::from_csv: expected " + std::to_string(n * n) +
                          " rows, got " + std::to_string(count));
  return from_matrix(g, std::move(m));
}

ObservableKind Observable::kind() const { return impl_->kind; }
const GridSpec& Observable::grid() const { return impl_->grid; }
const Eigen::MatrixXcd& Observable::matrix() const { return impl_->matrix; }
double Observable::op_norm() const { return impl_->op_norm; }
double Observable::triple_norm() const { return impl_->triple; }
const Eigen::VectorXd& Observable::eigenvalues() const { return impl_->eigenvalues; }
const Eigen::MatrixXcd& Observable::eigenvectors() const { return impl_->eigenvectors; }

ComplexField Observable::apply(const ComplexField& phi) const {
  require_same_grid(impl_->grid, phi.grid, "Observable::apply");
  VecMap v(phi.values.data(), phi.size());
  Eigen::VectorXcd w = impl_->matrix * v;
  ComplexField out(phi.grid);
  for (std::size_t i = 0; i < phi.size(); ++i) out[i] = w[i];
  return out;
}

double expectation(const Eigen::MatrixXcd& a, const ComplexField& phi) {
  if (static_cast<std::size_t>(a.rows()) != phi.size())
    throw grid_mismatch_error("expectation: matrix size does not match field");
  if (std::abs(l2_norm(phi) - 1.0) > 1e-8)
    throw parameter_error("expectation: field must be normalized");
  VecMap v(phi.values.data(), phi.size());
  cplx z = v.dot(a * v) * phi.grid.cell_volume();
  if (std::abs(z.imag()) > 1e-10)
    throw consistency_error("expectation: imaginary part " + std::to_string(z.imag()) +
                            " exceeds Hermiticity tolerance");
  return z.real();
}

double expectation(const Observable& o, const ComplexField& phi) {
  return expectation(o.matrix(), phi);
}

double variance(const Observable& o, const ComplexField& phi) {
  ComplexField w = o.apply(phi);
  double second = inner_product(w, w).real();
  double mean = expectation(o, phi);
  return second - mean * mean;
}

}  // namespace mfld
