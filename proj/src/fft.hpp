#pragma once

#include <complex>
#include <span>

namespace hdtk::detail {

enum class FftDirection { forward = -1, backward = +1 };

/// Unnormalized in-place DFT of an n^dim row-major array.
/// forward uses exp(-2 pi i k.m / n), backward exp(+2 pi i k.m / n).
void fft_inplace(std::span<std::complex<double>> data, int dim, int n, FftDirection dir);

}  // namespace hdtk::detail
