#pragma once

#include <complex>
#include <vector>

#include "chaoslink/common.hpp"

namespace chaoslink::dsp {

using cplx = std::complex<double>;

// Forward: X[k] = sum_t x[t] e^{-2*pi*i*k*t/n} (unscaled).
// Inverse: x[t] = (1/n) sum_k X[k] e^{+2*pi*i*k*t/n}.
// Any length n >= 1; power-of-two lengths run radix-2 directly, everything
// else goes through Bluestein's chirp-z reduction to a power-of-two size.
// Hand-rolled rather than FFTW so outputs are bit-reproducible (no planner).
std::vector<cplx> fft(std::vector<cplx> x);
std::vector<cplx> ifft(std::vector<cplx> x);

bool is_pow2(std::size_t n);

}  // namespace chaoslink::dsp
