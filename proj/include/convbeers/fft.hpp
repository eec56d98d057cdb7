#pragma once

#include <complex>
#include <vector>

namespace convbeers {

using ComplexGrid = std::vector<std::complex<double>>;

enum class FftDirection { forward, inverse };

/// Unnormalised 2-D DFT of a row-major height x width grid (FFTW backend).
/// forward uses exp(-2 pi i k n / N); inverse uses the + sign and does not
/// divide by N.
ComplexGrid fft2(const ComplexGrid& input, int width, int height, FftDirection dir);

/// DFT sample frequency of index k on an n-point grid, in cycles/sample,
/// range [-0.5, 0.5).
inline double dft_frequency(int k, int n) {
  return static_cast<double>(k < (n + 1) / 2 ? k : k - n) / n;
}

}  // namespace convbeers
