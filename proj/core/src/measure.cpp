#include "mfld/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mfld {

void SpectralMeasure::validate() const {
  if (values.size() != weights.size())
    throw consistency_error("SpectralMeasure: value/weight length mismatch");
  if (scale < 1) throw parameter_error("SpectralMeasure: scale must be >= 1");
  double sum = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw consistency_error("SpectralMeasure: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw consistency_error("SpectralMeasure: weights sum to " + std::to_string(sum));
}

double measure_mean(const SpectralMeasure& m) {
  double acc = 0;
  for (std::size_t k = 0; k < m.size(); ++k) acc += m.weights[k] * m.values[k];
  return acc;
}

double measure_variance(const SpectralMeasure& m) {
  double mean = measure_mean(m);
  double acc = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    double d = m.values[k] - mean;
    acc += m.weights[k] * d * d;
  }
  return acc;
}

double empirical_lmgf(const SpectralMeasure& m, double lambda) {
  if (m.size() == 0) throw parameter_error("empirical_lmgf: empty measure");
  double n = static_cast<double>(m.scale);
  double shift = -std::numeric_limits<double>::infinity();
  for (double o : m.values) shift = std::max(shift, lambda * n * o);
  double acc = 0;
  for (std::size_t k = 0; k < m.size(); ++k)
    acc += m.weights[k] * std::exp(lambda * n * m.values[k] - shift);
  return (shift + std::log(acc)) / n;
}

double tail_probability(const SpectralMeasure& m, double x) {
  double acc = 0;
  for (std::size_t k = 0; k < m.size(); ++k)
    if (m.values[k] > x) acc += m.weights[k];
  return acc;
}

SpectralMeasure tilted_measure(const SpectralMeasure& m, double lambda) {
  m.validate();
  SpectralMeasure out = m;
  double shift = -std::numeric_limits<double>::infinity();
  for (double o : m.values) shift = std::max(shift, lambda * o);
  double z = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    out.weights[k] = m.weights[k] * std::exp(lambda * m.values[k] - shift);
    z += out.weights[k];
  }
  for (double& w : out.weights) w /= z;
  return out;
}

}  // namespace mfld
