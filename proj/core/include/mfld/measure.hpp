#pragma once

#include <cstddef>
#include <vector>

#include "mfld/errors.hpp"

namespace mfld {

// Law of a scalar observable: atoms (value, weight). scale carries the N of
// O_{N,t} laws so the LMGF N^{-1} log E[e^{lambda N O}] can be evaluated;
// one-particle laws use scale 1.
struct SpectralMeasure {
  std::vector<double> values;
  std::vector<double> weights;
  int scale = 1;

  std::size_t size() const { return values.size(); }
  void validate() const;  // weights >= 0, sum 1 within 1e-10, sizes match
};

double measure_mean(const SpectralMeasure& m);
double measure_variance(const SpectralMeasure& m);

// N^{-1} log sum w_k e^{lambda N o_k}, max-shifted; N = m.scale.
double empirical_lmgf(const SpectralMeasure& m, double lambda);

// P[value > x] = sum of weights with o_k > x.
double tail_probability(const SpectralMeasure& m, double x);

// w~_k = w_k e^{lambda o_k} / normalizer; values unchanged.
SpectralMeasure tilted_measure(const SpectralMeasure& m, double lambda);

}  // namespace mfld
