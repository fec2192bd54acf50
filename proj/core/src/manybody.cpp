#include "mfld/manybody.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mfld {

namespace {

constexpr std::size_t kBasisCap = 200000;
constexpr std::size_t kDenseStatisticsCap = 5000;
constexpr int kKrylovDim = 20;
constexpr double kKrylovTol = 1e-10;

// compositions of n into m ordered slots: binomial(n+m-1, m-1)
std::size_t compositions(int n, int m) {
  if (m == 0) return n == 0 ? 1 : 0;
  unsigned long long r = 1;
  for (int i = 1; i < m; ++i) {
    r = r * (n + i) / i;  // exact: product of i consecutive integers / i!
  }
  return static_cast<std::size_t>(r);
}

void check_modes(const FockBasis& basis, const GridSpec& g, const char* where) {
  if (g.dim != 1)
    throw parameter_error(std::string(where) + ": oracle supports d=1 grids only");
  if (static_cast<std::size_t>(basis.modes()) != g.size())
    throw grid_mismatch_error(std::string(where) + ": mode count does not match grid");
}

// out += one-body operator sum_pq m[p,q] a+_p a_q applied to in
void apply_one_body_sector(const FockBasis& basis, const Eigen::MatrixXcd& m,
                           const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  int modes = basis.modes();
  std::size_t dim = basis.dimension();
  std::vector<int> scratch(modes);
  for (std::size_t s = 0; s < dim; ++s) {
    if (in[s] == cplx(0, 0)) continue;
    const int* n = basis.occupation(s);
    double diag = 0;
    for (int p = 0; p < modes; ++p)
      if (n[p] > 0) diag += m(p, p).real() * n[p];
    out[s] += diag * in[s];
    for (int q = 0; q < modes; ++q) {
      if (n[q] == 0) continue;
      for (int p = 0; p < modes; ++p) {
        if (p == q || m(p, q) == cplx(0, 0)) continue;
        std::copy(n, n + modes, scratch.begin());
        scratch[q] -= 1;
        scratch[p] += 1;
        double amp = std::sqrt(static_cast<double>(n[q]) * (n[p] + 1));
        out[basis.index_of(scratch.data())] += m(p, q) * amp * in[s];
      }
    }
  }
}

}  // namespace

FockBasis::FockBasis(int modes, int particles) : modes_(modes), particles_(particles) {
  std::size_t dim = dimension_for(modes, particles);
  flat_.reserve(dim * modes);
  std::vector<int> occ(modes, 0);
  // descending enumeration: highest occupation of the leading mode first
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == modes - 1) {
      occ[pos] = rem;
      flat_.insert(flat_.end(), occ.begin(), occ.end());
      return;
    }
    for (int c = rem; c >= 0; --c) {
      occ[pos] = c;
      self(self, pos + 1, rem - c);
    }
  };
  rec(rec, 0, particles);
}

std::size_t FockBasis::index_of(const int* occ) const {
  std::size_t idx = 0;
  int rem = particles_;
  for (int pos = 0; pos < modes_ - 1; ++pos) {
    for (int c = rem; c > occ[pos]; --c) idx += compositions(rem - c, modes_ - pos - 1);
    rem -= occ[pos];
  }
  return idx;
}

std::size_t FockBasis::dimension_for(int modes, int particles) {
  if (modes < 1 || particles < 1)
    throw parameter_error("FockBasis: modes and particles must be positive");
  unsigned long long dim = 1;
  for (int i = 1; i < modes; ++i) {
    dim = dim * (particles + i) / i;
    if (dim > 100 * kBasisCap)
      throw basis_size_error("FockBasis: dimension exceeds cap 200000");
  }
  if (dim > kBasisCap)
    throw basis_size_error("FockBasis: dimension " + std::to_string(dim) +
                           " exceeds cap 200000");
  return static_cast<std::size_t>(dim);
}

std::shared_ptr<const FockBasis> build_basis(int modes, int particles) {
  return std::make_shared<FockBasis>(modes, particles);
}

Eigen::MatrixXcd site_laplacian_matrix(const GridSpec& g) {
  std::size_t n = g.size();
  Eigen::MatrixXcd h(n, n);
  ComplexField e(g);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.values.begin(), e.values.end(), cplx(0, 0));
    e[j] = 1.0;
    ComplexField col = minus_laplacian(e);
    for (std::size_t i = 0; i < n; ++i) h(i, j) = col[i];
  }
  return 0.5 * (h + h.adjoint().eval());
}

SecondQuantizedHamiltonian::SecondQuantizedHamiltonian(GridSpec grid, Potential v,
                                                       Eigen::MatrixXcd one_body,
                                                       std::shared_ptr<const FockBasis> basis)
    : grid_(std::move(grid)), v_(std::move(v)), one_body_(std::move(one_body)),
      basis_(std::move(basis)) {
  check_modes(*basis_, grid_, "SecondQuantizedHamiltonian");
  require_same_grid(grid_, v_.grid(), "SecondQuantizedHamiltonian");
  if ((one_body_ - one_body_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw consistency_error("SecondQuantizedHamiltonian: one-body matrix not Hermitian");
  // interaction is diagonal in the occupation basis:
  // (1/2N) sum_xy v(x-y) (n_x n_y - delta_xy n_x)
  int modes = basis_->modes();
  int n_part = basis_->particles();
  std::size_t dim = basis_->dimension();
  diagonal_.resize(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    const int* n = basis_->occupation(s);
    double acc = 0;
    for (int x = 0; x < modes; ++x) {
      if (n[x] == 0) continue;
      for (int y = 0; y < modes; ++y) {
        if (n[y] == 0) continue;
        double pair_count = (x == y) ? static_cast<double>(n[x]) * (n[x] - 1)
                                     : static_cast<double>(n[x]) * n[y];
        acc += v_.at_displacement(x, y) * pair_count;
      }
    }
    diagonal_[s] = acc / (2.0 * n_part);
  }
}

Eigen::VectorXcd SecondQuantizedHamiltonian::apply(const Eigen::VectorXcd& in) const {
  if (in.size() != static_cast<Eigen::Index>(basis_->dimension()))
    throw grid_mismatch_error("SecondQuantizedHamiltonian::apply: wrong vector length");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (Eigen::Index s = 0; s < in.size(); ++s) out[s] = diagonal_[s] * in[s];
  apply_one_body_sector(*basis_, one_body_, in, out);
  return out;
}

double SecondQuantizedHamiltonian::energy(const ManyBodyState& psi) const {
  cplx e = psi.amplitudes.dot(apply(psi.amplitudes));
  return e.real() / psi.amplitudes.squaredNorm();
}

SecondQuantizedHamiltonian build_hamiltonian(const GridSpec& g, const Potential& v,
                                             int particles) {
  return build_hamiltonian(g, v, site_laplacian_matrix(g), particles);
}

SecondQuantizedHamiltonian build_hamiltonian(const GridSpec& g, const Potential& v,
                                             Eigen::MatrixXcd one_body, int particles) {
  auto basis = build_basis(static_cast<int>(g.size()), particles);
  return SecondQuantizedHamiltonian(g, v, std::move(one_body), std::move(basis));
}

ManyBodyState product_state(const ComplexField& phi, std::shared_ptr<const FockBasis> basis) {
  check_modes(*basis, phi.grid, "product_state");
  if (std::abs(l2_norm(phi) - 1.0) > 1e-8)
    throw parameter_error("product_state: phi must be normalized");
  std::size_t m = phi.size();
  Eigen::VectorXcd u(m);
  double hroot = std::sqrt(phi.grid.cell_volume());
  for (std::size_t i = 0; i < m; ++i) u[i] = hroot * phi[i];
  u /= u.norm();

  int n_part = basis->particles();
  std::vector<double> log_fact(n_part + 1, 0.0);
  for (int k = 2; k <= n_part; ++k) log_fact[k] = log_fact[k - 1] + std::log(k);

  ManyBodyState psi;
  psi.basis = basis;
  psi.amplitudes.resize(basis->dimension());
  for (std::size_t s = 0; s < basis->dimension(); ++s) {
    const int* n = basis->occupation(s);
    double log_multi = log_fact[n_part];
    cplx prod = 1.0;
    for (std::size_t x = 0; x < m; ++x) {
      log_multi -= log_fact[n[x]];
      for (int k = 0; k < n[x]; ++k) prod *= u[x];
    }
    psi.amplitudes[s] = std::exp(0.5 * log_multi) * prod;
  }
  return psi;
}

namespace {

// One Lanczos step of e^{-i dt H}; subdivides when the a-posteriori
// estimate exceeds the tolerance.
Eigen::VectorXcd krylov_step(const SecondQuantizedHamiltonian& h, const Eigen::VectorXcd& in,
                             double dt, int depth, int* max_depth) {
  *max_depth = std::max(*max_depth, depth);
  double beta0 = in.norm();
  if (beta0 == 0) return in;
  Eigen::Index dim = in.size();
  int m = std::min<Eigen::Index>(kKrylovDim, dim);

  Eigen::MatrixXcd basis(dim, m);
  Eigen::VectorXd alpha(m), beta(m);
  basis.col(0) = in / beta0;
  int built = 0;
  double next_beta = 0;
  Eigen::VectorXcd w;
  for (int j = 0; j < m; ++j) {
    w = h.apply(basis.col(j));
    if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
    alpha[j] = basis.col(j).dot(w).real();
    w -= alpha[j] * basis.col(j);
    // full reorthogonalization keeps the small subspace numerically clean
    for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
    built = j + 1;
    next_beta = w.norm();
    if (j + 1 < m) {
      if (next_beta < 1e-14 * beta0) break;  // happy breakdown: exact subspace
      beta[j] = next_beta;
      basis.col(j + 1) = w / next_beta;
    }
  }

  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(built, built);
  for (int j = 0; j < built; ++j) {
    tri(j, j) = alpha[j];
    if (j + 1 < built) tri(j, j + 1) = tri(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
  Eigen::VectorXcd phases(built);
  for (int j = 0; j < built; ++j) phases[j] = std::polar(1.0, -dt * es.eigenvalues()[j]);
  Eigen::VectorXcd e1 = es.eigenvectors().row(0).transpose().cast<cplx>();
  Eigen::VectorXcd small = es.eigenvectors().cast<cplx>() * phases.cwiseProduct(e1);
  // a-posteriori estimate: weight leaking into the first discarded vector
  double err = built < m ? 0.0 : std::abs(next_beta * std::abs(small[built - 1]) * dt);
  if (err > kKrylovTol && depth < 30) {
    Eigen::VectorXcd half = krylov_step(h, in, dt / 2, depth + 1, max_depth);
    return krylov_step(h, half, dt / 2, depth + 1, max_depth);
  }
  return basis.leftCols(built) * (beta0 * small);
}

}  // namespace

ManyBodyState evolve_exact(const ManyBodyState& psi, const SecondQuantizedHamiltonian& h,
                           double T, double tau, EvolveReport* report) {
  if (!psi.basis || psi.basis->modes() != h.basis()->modes() ||
      psi.basis->particles() != h.basis()->particles())
    throw grid_mismatch_error("evolve_exact: state and Hamiltonian use different bases");
  if (tau == 0) throw parameter_error("evolve_exact: tau must be nonzero");
  if (!(T > 0)) throw parameter_error("evolve_exact: T must be positive");
  double ratio = T / std::abs(tau);
  auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
    throw parameter_error("evolve_exact: tau must divide T");

  double e0 = h.energy(psi);
  double norm0 = psi.amplitudes.norm();
  ManyBodyState out = psi;
  int max_depth = 0;
  double dt = tau > 0 ? std::abs(tau) : -std::abs(tau);
  for (std::size_t k = 0; k < steps; ++k)
    out.amplitudes = krylov_step(h, out.amplitudes, dt, 0, &max_depth);

  double norm_defect = std::abs(out.amplitudes.norm() - norm0);
  double drift = std::abs(h.energy(out) - e0) / std::max(1.0, std::abs(e0));
  if (report) {
    report->steps = steps;
    report->max_subdivisions = max_depth;
    report->norm_defect = norm_defect;
    report->energy_drift = drift;
  }
  if (norm_defect > 1e-8)
    throw propagation_error("evolve_exact: norm defect " + std::to_string(norm_defect));
  if (drift > 1e-8)
    throw propagation_error("evolve_exact: relative energy drift " + std::to_string(drift));
  return out;
}

SpectralMeasure observable_statistics(const ManyBodyState& psi, const Observable& o,
                                      double mean_ref) {
  const FockBasis& basis = *psi.basis;
  check_modes(basis, o.grid(), "observable_statistics");
  std::size_t dim = basis.dimension();
  if (dim > kDenseStatisticsCap)
    throw basis_size_error("observable_statistics: dimension " + std::to_string(dim) +
                           " exceeds dense cap 5000; use observable_moments instead");
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(dim);
  Eigen::VectorXcd col = Eigen::VectorXcd::Zero(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    unit[j] = 1.0;
    col.setZero();
    apply_one_body_sector(basis, o.matrix(), unit, col);
    big.col(j) = col;
    unit[j] = 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (big + big.adjoint()));
  Eigen::VectorXcd overlaps = es.eigenvectors().adjoint() * psi.amplitudes;
  double total = psi.amplitudes.squaredNorm();
  int n_part = basis.particles();
  SpectralMeasure m;
  m.scale = n_part;
  m.values.resize(dim);
  m.weights.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    m.values[k] = es.eigenvalues()[k] / n_part - mean_ref;
    m.weights[k] = std::norm(overlaps[k]) / total;
  }
  return m;
}

std::vector<double> observable_moments(const ManyBodyState& psi, const Observable& o,
                                       double mean_ref, int order) {
  const FockBasis& basis = *psi.basis;
  check_modes(basis, o.grid(), "observable_moments");
  if (order < 0 || order > 4)
    throw parameter_error("observable_moments: order must be in [0,4]");
  double n_part = basis.particles();
  double total = psi.amplitudes.squaredNorm();
  std::vector<double> moments(order + 1);
  moments[0] = 1.0;
  Eigen::VectorXcd w = psi.amplitudes;
  for (int j = 1; j <= order; ++j) {
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(w.size());
    apply_one_body_sector(basis, o.matrix(), w, next);
    next /= n_part;
    next -= mean_ref * w;
    w = next;
    moments[j] = psi.amplitudes.dot(w).real() / total;
  }
  return moments;
}

Eigen::MatrixXcd reduced_density(const ManyBodyState& psi) {
  const FockBasis& basis = *psi.basis;
  int modes = basis.modes();
  int n_part = basis.particles();
  std::size_t dim = basis.dimension();
  Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Zero(modes, modes);
  std::vector<int> scratch(modes);
  const int* occ;
  for (std::size_t s = 0; s < dim; ++s) {
    if (psi.amplitudes[s] == cplx(0, 0)) continue;
    occ = basis.occupation(s);
    for (int p = 0; p < modes; ++p) {
      if (occ[p] == 0) continue;
      gamma(p, p) += static_cast<double>(occ[p]) * std::norm(psi.amplitudes[s]);
      for (int q = 0; q < modes; ++q) {
        if (q == p) continue;
        std::copy(occ, occ + modes, scratch.begin());
        scratch[p] -= 1;
        scratch[q] += 1;
        double amp = std::sqrt(static_cast<double>(occ[p]) * (occ[q] + 1));
        std::size_t target = basis.index_of(scratch.data());
        // <psi, a+_q a_p psi> picks up conj(psi[target]) psi[s]
        gamma(p, q) += amp * std::conj(psi.amplitudes[target]) * psi.amplitudes[s];
      }
    }
  }
  gamma /= (psi.amplitudes.squaredNorm() * n_part);
  return 0.5 * (gamma + gamma.adjoint().eval());
}

}  // namespace mfld
