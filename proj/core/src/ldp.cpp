#include "mfld/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mfld {

const char* provenance_name(CurveProvenance p) {
  switch (p) {
    case CurveProvenance::analytic_iid: return "analytic-iid";
    case CurveProvenance::oracle_n: return "oracle-N";
    case CurveProvenance::bogoliubov_quadratic: return "bogoliubov-quadratic";
  }
  return "unknown";
}

void MgfCurve::validate() const {
  if (lambdas.size() != values.size() || lambdas.size() < 2)
    throw consistency_error("MgfCurve: need matching lambda/value arrays with >= 2 points");
  if (lambdas.front() != 0.0)
    throw consistency_error("MgfCurve: lambda grid must start at 0");
  if (std::abs(values.front()) > 1e-12)
    throw consistency_error("MgfCurve: Lambda(0) = " + std::to_string(values.front()));
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < lambdas.size(); ++k) {
    if (!(lambdas[k + 1] > lambdas[k]))
      throw consistency_error("MgfCurve: lambda grid must be strictly increasing");
    double slope = (values[k + 1] - values[k]) / (lambdas[k + 1] - lambdas[k]);
    if (slope < prev_slope - 1e-9)
      throw consistency_error("MgfCurve: convexity violated near lambda = " +
                              std::to_string(lambdas[k]));
    prev_slope = slope;
  }
}

std::vector<double> geometric_lambda_grid(double lambda_min, double lambda_max, int count) {
  if (!(lambda_min > 0) || !(lambda_max > lambda_min))
    throw parameter_error("geometric_lambda_grid: need 0 < lambda_min < lambda_max");
  if (count < 2) throw parameter_error("geometric_lambda_grid: count must be >= 2");
  std::vector<double> grid;
  grid.reserve(count + 1);
  grid.push_back(0.0);
  double ratio = std::pow(lambda_max / lambda_min, 1.0 / (count - 1));
  for (int k = 0; k < count; ++k) grid.push_back(lambda_min * std::pow(ratio, k));
  grid.back() = lambda_max;
  return grid;
}

SpectralMeasure iid_spectral_measure(const ComplexField& phi, const Observable& o) {
  require_same_grid(phi.grid, o.grid(), "iid_spectral_measure");
  double mean = expectation(o, phi);
  std::size_t n = phi.size();
  Eigen::Map<const Eigen::VectorXcd> v(phi.values.data(), n);
  Eigen::VectorXcd overlaps = o.eigenvectors().adjoint() * v;
  double hd = phi.grid.cell_volume();
  SpectralMeasure m;
  m.scale = 1;
  m.values.resize(n);
  m.weights.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    m.values[k] = o.eigenvalues()[k] - mean;
    m.weights[k] = std::norm(overlaps[k]) * hd;
  }
  return m;
}

double iid_lmgf(const ComplexField& phi, const Observable& o, double lambda) {
  return empirical_lmgf(iid_spectral_measure(phi, o), lambda);
}

MgfCurve curve_from_measure(const SpectralMeasure& m, std::vector<double> lambdas,
                            CurveProvenance provenance) {
  MgfCurve curve;
  curve.provenance = provenance;
  curve.values.reserve(lambdas.size());
  for (double l : lambdas) curve.values.push_back(empirical_lmgf(m, l));
  curve.lambdas = std::move(lambdas);
  curve.validate();
  return curve;
}

MgfCurve quadratic_curve(double sigma2, std::vector<double> lambdas) {
  if (!(sigma2 >= 0)) throw parameter_error("quadratic_curve: sigma2 must be >= 0");
  MgfCurve curve;
  curve.provenance = CurveProvenance::bogoliubov_quadratic;
  curve.values.reserve(lambdas.size());
  for (double l : lambdas) curve.values.push_back(0.5 * sigma2 * l * l);
  curve.lambdas = std::move(lambdas);
  curve.validate();
  return curve;
}

double legendre_fenchel(const MgfCurve& curve, double x) {
  curve.validate();
  const auto& l = curve.lambdas;
  const auto& f = curve.values;
  std::size_t n = l.size();
  double first_slope = (f[1] - f[0]) / (l[1] - l[0]);
  double last_slope = (f[n - 1] - f[n - 2]) / (l[n - 1] - l[n - 2]);
  if (x > last_slope)
    throw conjugate_domain_error("legendre_fenchel: x = " + std::to_string(x) +
                                 " beyond achievable slopes [" + std::to_string(first_slope) +
                                 ", " + std::to_string(last_slope) + "]");
  // convexity puts the supremum at lambda=0 for any x at or below the first
  // secant slope; return the grid value there instead of a refined one so
  // centered curves conjugate to exactly zero
  if (x <= first_slope) return l[0] * x - f[0];
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    double val = l[k] * x - f[k];
    if (val > best_val) {
      best_val = val;
      best = k;
    }
  }
  // local quadratic least-squares model around the maximizing vertex; the
  // stationarity of the conjugate makes the refinement second-order accurate
  std::size_t lo = best >= 2 ? best - 2 : 0;
  std::size_t hi = std::min(n - 1, lo + 4);
  lo = hi >= 4 ? hi - 4 : 0;
  std::size_t m = hi - lo + 1;
  if (m >= 3) {
    double c = l[best];
    Eigen::MatrixXd a(m, 3);
    Eigen::VectorXd b(m);
    for (std::size_t i = 0; i < m; ++i) {
      double d = l[lo + i] - c;
      a(i, 0) = 1;
      a(i, 1) = d;
      a(i, 2) = d * d;
      b(i) = f[lo + i];
    }
    Eigen::Vector3d p = a.colPivHouseholderQr().solve(b);
    if (p[2] > 0) {
      double d_star = (x - p[1]) / (2 * p[2]);
      double lam = std::clamp(c + d_star, l[lo], l[hi]);
      double d = lam - c;
      double refined = lam * x - (p[0] + p[1] * d + p[2] * d * d);
      best_val = std::max(best_val, refined);
    }
  }
  return best_val;
}

double quadratic_rate(double sigma2, double x) {
  if (!(sigma2 > 0))
    throw parameter_error("quadratic_rate: degenerate observable, sigma2 must be positive");
  return x * x / (2 * sigma2);
}

double chebyshev_envelope(const MgfCurve& curve, double x) {
  curve.validate();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < curve.lambdas.size(); ++k)
    best = std::min(best, curve.values[k] - curve.lambdas[k] * x);
  return best;
}

RateEnvelope theorem_envelopes(double sigma2, double triple_o, double c1, double c2, double t,
                               std::vector<double> xs) {
  if (!(c1 > 0) || !(c2 > 0))
    throw parameter_error("theorem_envelopes: constants must be positive");
  if (!(sigma2 > 0) || !(triple_o > 0))
    throw parameter_error("theorem_envelopes: sigma2 and |||O||| must be positive");
  RateEnvelope env;
  double grow1 = std::exp(std::exp(c1 * t));
  double grow2 = std::exp(std::exp(c2 * t));
  double cubic_coeff = c1 * grow1 * std::pow(triple_o, 3) / std::pow(sigma2, 3);
  double five_half_coeff = c2 * grow2 * std::pow(triple_o, 1.5) / (sigma2 * sigma2);
  env.window_lower = sigma2 / (grow1 * triple_o);
  env.window_upper = sigma2 * sigma2 / (grow2 * c2 * std::pow(triple_o, 3));
  env.window = std::min(env.window_lower, env.window_upper);
  env.quadratic.reserve(xs.size());
  env.lower.reserve(xs.size());
  env.upper.reserve(xs.size());
  for (double x : xs) {
    double q = x * x / (2 * sigma2);
    env.quadratic.push_back(q);
    env.lower.push_back(q - std::pow(x, 3) * cubic_coeff);
    env.upper.push_back(q + std::pow(x, 2.5) * five_half_coeff);
  }
  env.xs = std::move(xs);
  return env;
}

std::pair<double, double> smallest_envelope_constants(const std::vector<double>& xs,
                                                      const std::vector<double>& rates,
                                                      double sigma2, double triple_o, double t) {
  if (xs.size() != rates.size())
    throw parameter_error("smallest_envelope_constants: size mismatch");
  double nan = std::numeric_limits<double>::quiet_NaN();
  double best1 = nan, best2 = nan;
  for (int k = 0; k <= 600; ++k) {
    double c = std::pow(10.0, -3.0 + k * 0.01);
    double grow = std::exp(std::exp(c * t));
    // lower curve with constant c and its own window
    if (std::isnan(best1)) {
      double coeff = c * grow * std::pow(triple_o, 3) / std::pow(sigma2, 3);
      double window = sigma2 / (grow * triple_o);
      bool ok = true;
      for (std::size_t i = 0; i < xs.size() && ok; ++i) {
        if (xs[i] <= 0 || xs[i] > window) continue;
        double q = xs[i] * xs[i] / (2 * sigma2);
        if (rates[i] < q - std::pow(xs[i], 3) * coeff - 1e-12) ok = false;
      }
      if (ok) best1 = c;
    }
    if (std::isnan(best2)) {
      double coeff = c * grow * std::pow(triple_o, 1.5) / (sigma2 * sigma2);
      double window = sigma2 * sigma2 / (grow * c * std::pow(triple_o, 3));
      bool ok = true;
      for (std::size_t i = 0; i < xs.size() && ok; ++i) {
        if (xs[i] <= 0 || xs[i] > window) continue;
        double q = xs[i] * xs[i] / (2 * sigma2);
        if (rates[i] > q + std::pow(xs[i], 2.5) * coeff + 1e-12) ok = false;
      }
      if (ok) best2 = c;
    }
    if (!std::isnan(best1) && !std::isnan(best2)) break;
  }
  return {best1, best2};
}

ExtrapolationFit extrapolate_inverse_n(const std::vector<int>& ns,
                                       const std::vector<double>& values, int degree) {
  std::size_t n = ns.size();
  if (n != values.size() || n == 0)
    throw parameter_error("extrapolate_inverse_n: need matching nonempty arrays");
  if (degree < 0 || static_cast<std::size_t>(degree) + 1 > n)
    throw parameter_error("extrapolate_inverse_n: degree needs at least degree+1 points");
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (ns[i] <= 0) throw parameter_error("extrapolate_inverse_n: N must be positive");
    double u = 1.0 / ns[i];
    double p = 1;
    for (int j = 0; j <= degree; ++j) {
      a(i, j) = p;
      p *= u;
    }
    b(i) = values[i];
  }
  Eigen::VectorXd coeff = a.colPivHouseholderQr().solve(b);
  ExtrapolationFit fit;
  fit.extrapolated = coeff[0];
  fit.coefficients.assign(coeff.data(), coeff.data() + coeff.size());
  fit.rms_residual = std::sqrt((a * coeff - b).squaredNorm() / static_cast<double>(n));
  return fit;
}

PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw parameter_error("fit_power_law: need >= 2 matching points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || ys[i] == 0) continue;
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(std::abs(ys[i])));
  }
  if (lx.size() < 2) throw parameter_error("fit_power_law: not enough usable points");
  std::size_t n = lx.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double cubic_envelope_constant(const std::vector<double>& lambdas,
                               const std::vector<double>& residuals) {
  if (lambdas.size() != residuals.size())
    throw parameter_error("cubic_envelope_constant: size mismatch");
  double c = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (lambdas[i] > 0)
      c = std::max(c, std::abs(residuals[i]) / std::pow(lambdas[i], 3));
  return c;
}

}  // namespace mfld
