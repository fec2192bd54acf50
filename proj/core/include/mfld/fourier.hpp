#pragma once

#include "mfld/grid.hpp"

namespace mfld::fft {

// Unnormalized DFT, FFTW sign convention: forward multiplies by e^{-i k.x}.
// in/out may alias. Plans are cached per (dim, M, direction).
void forward(const GridSpec& g, const cplx* in, cplx* out);
void inverse(const GridSpec& g, const cplx* in, cplx* out);

}  // namespace mfld::fft
