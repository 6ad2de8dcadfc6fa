#pragma once

#include <complex>
#include <vector>

namespace somnoscat {

/// In-place iterative radix-2 FFT. Length must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

/// In-place DFT of arbitrary length (Bluestein's algorithm for lengths that
/// are not powers of two).
void fft_any(std::vector<std::complex<double>>& a, bool inverse = false);

std::vector<std::complex<double>> fft_real(const std::vector<double>& x,
                                           std::size_t n_fft);

}  // namespace somnoscat
