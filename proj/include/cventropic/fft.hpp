#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace cventropic::fft {

/// In-place unnormalized DFT of length data.size():
/// forward X_k = sum_j x_j e^{-2 pi i jk/N}, backward uses e^{+2 pi i jk/N}.
/// Plans are cached per (length, direction); safe to call from several threads.
void forward(std::span<std::complex<double>> data);
void backward(std::span<std::complex<double>> data);

/// Angular frequency of DFT bin m for sample spacing dx (FFT ordering:
/// bins N/2.. map to negative frequencies).
double angular_frequency(std::size_t m, std::size_t n, double dx);

}  // namespace cventropic::fft
