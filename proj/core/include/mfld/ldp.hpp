#pragma once

#include <utility>
#include <vector>

#include "mfld/measure.hpp"
#include "mfld/observable.hpp"

namespace mfld {

enum class CurveProvenance { analytic_iid, oracle_n, bogoliubov_quadratic };

const char* provenance_name(CurveProvenance p);

// Sampled log moment generating function on a non-negative lambda grid.
struct MgfCurve {
  std::vector<double> lambdas;  // increasing, lambdas[0] == 0
  std::vector<double> values;
  CurveProvenance provenance = CurveProvenance::analytic_iid;

  // grid shape, Lambda(0)=0 within 1e-12, secant slopes nondecreasing
  // within 1e-9 (convexity)
  void validate() const;
};

// Geometric grid {0, max*ratio^{-(count-1)}, ..., max}; ratio derived from
// min/max, count >= 2 points beyond zero.
std::vector<double> geometric_lambda_grid(double lambda_min, double lambda_max, int count);

// Centered one-particle law of O under phi: atoms (o_k - <O>_phi, |<u_k,phi>|^2).
SpectralMeasure iid_spectral_measure(const ComplexField& phi, const Observable& o);

// log <phi, e^{lambda(O - <O>)} phi> via the spectral decomposition.
double iid_lmgf(const ComplexField& phi, const Observable& o, double lambda);

MgfCurve curve_from_measure(const SpectralMeasure& m, std::vector<double> lambdas,
                            CurveProvenance provenance);
MgfCurve quadratic_curve(double sigma2, std::vector<double> lambdas);

// sup_lambda [lambda x - Lambda(lambda)] >= 0 over the curve's grid, refined
// by a local quadratic model around the maximizing vertex. x below the
// smallest achievable slope returns the value at lambda=0 (that is, 0 for a
// centered curve); x above the largest achievable slope throws
// conjugate_domain_error naming the interval.
double legendre_fenchel(const MgfCurve& curve, double x);

// x^2 / (2 sigma_t^2) in the non-negative rate convention.
double quadratic_rate(double sigma2, double x);

// inf over the lambda grid of (Lambda(lambda) - lambda x): best exponential
// upper bound on N^{-1} log P[O > x].
double chebyshev_envelope(const MgfCurve& curve, double x);

// Quadratic rate with the theorem's correction curves in the non-negative
// convention: lower = q - x^3 C1 e^{e^{C1 t}} T^3 / s^6,
// upper = q + x^{5/2} C2 e^{e^{C2 t}} T^{3/2} / s^4, T = |||O|||, s^2 = sigma2.
// Validity windows: lower curve x <= e^{-e^{C1 t}} s^2 / T,
// upper curve x <= e^{-e^{C2 t}} s^4 / (C2 T^3).
struct RateEnvelope {
  std::vector<double> xs;
  std::vector<double> quadratic;
  std::vector<double> lower;
  std::vector<double> upper;
  double window_lower = 0;  // x_max for the lower curve
  double window_upper = 0;  // x_max for the upper curve
  double window = 0;        // min of the two
};

RateEnvelope theorem_envelopes(double sigma2, double triple_o, double c1, double c2, double t,
                               std::vector<double> xs);

// Smallest constants on a geometric scan making the envelope curves bracket
// the supplied empirical rates on their own validity windows; NaN when no
// constant in the scan works.
std::pair<double, double> smallest_envelope_constants(const std::vector<double>& xs,
                                                      const std::vector<double>& rates,
                                                      double sigma2, double triple_o, double t);

// Least-squares polynomial in 1/N evaluated at 1/N = 0.
struct ExtrapolationFit {
  double extrapolated = 0;
  std::vector<double> coefficients;  // a0 + a1/N + a2/N^2 + ...
  double rms_residual = 0;
};
ExtrapolationFit extrapolate_inverse_n(const std::vector<int>& ns,
                                       const std::vector<double>& values, int degree);

// log-log regression |y| ~ prefactor * x^exponent.
struct PowerLawFit {
  double exponent = 0;
  double prefactor = 0;
  double r_squared = 0;
};
PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys);

// max |r_k| / lambda_k^3 over nonzero lambdas: the cubic envelope constant.
double cubic_envelope_constant(const std::vector<double>& lambdas,
                               const std::vector<double>& residuals);

}  // namespace mfld
