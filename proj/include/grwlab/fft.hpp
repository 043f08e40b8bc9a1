#pragma once

#include <complex>
#include <span>
#include <vector>

namespace grw::fft {

// Unitary (1/sqrt(N)) complex transforms backed by FFTW. Plans are cached per length and
// shared; execution is thread-safe.
std::vector<std::complex<double>> forward(std::span<const std::complex<double>> in);
std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> in);

void forward_in_place(std::vector<std::complex<double>>& data);
void inverse_in_place(std::vector<std::complex<double>>& data);

// Cyclic cross-correlation c[s] = sum_i a[i] * b[(i + s) mod N] for real sequences.
std::vector<double> cyclic_cross_correlation(std::span<const double> a, std::span<const double> b);

// Cyclic convolution (a * b)[j] = sum_i a[i] * b[(j - i) mod N] for real sequences.
std::vector<double> cyclic_convolution(std::span<const double> a, std::span<const double> b);

}  // namespace grw::fft
