#pragma once

#include <complex>
#include <span>

namespace wpk {

using cplx = std::complex<double>;

// Unnormalized in-place DFTs backed by FFTW.
//   forward:  X_k = sum_j x_j e^{-2 pi i jk/n}
//   backward: x_j = sum_k X_k e^{+2 pi i jk/n}   (no 1/n)
// Plans are cached per length; execution is safe from multiple threads.
void fft_forward(std::span<cplx> data);
void fft_backward(std::span<cplx> data);

} // namespace wpk
