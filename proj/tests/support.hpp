#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "grwlab/error.hpp"
#include "grwlab/rng.hpp"
#include "grwlab/state.hpp"

namespace grw::testing {

template <typename Fn>
bool throws_code(ErrorCode code, Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Normalized random state with smooth-ish random amplitudes and phases.
inline WaveFunction1D random_state(const Grid1D& grid, RngStream& rng) {
    ComplexVector amps(grid.size());
    for (auto& a : amps) a = std::polar(rng.uniform() + 0.05, 2.0 * std::numbers::pi * rng.uniform());
    return normalize(WaveFunction1D(grid, std::move(amps)));
}

// Sum of two equal-width Gaussian amplitudes with the given complex weights.
inline WaveFunction1D two_packets(const Grid1D& grid, double x1, double x2, double width, Complex w1, Complex w2) {
    const auto p1 = WaveFunction1D::gaussian(grid, x1, width);
    const auto p2 = WaveFunction1D::gaussian(grid, x2, width);
    ComplexVector amps(grid.size());
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = w1 * p1[i] + w2 * p2[i];
    return normalize(WaveFunction1D(grid, std::move(amps)));
}

// Variance of hbar*k from |psi_k|^2 (momentum-space spread).
inline double momentum_variance(const WaveFunction1D& psi, double hbar) {
    const auto mom = momentum_representation(psi);
    const auto k = psi.grid().wavenumbers();
    double total = 0.0, first = 0.0, second = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        const double w = std::norm(mom[j]);
        total += w;
        first += w * k[j];
        second += w * k[j] * k[j];
    }
    const double mean = first / total;
    return hbar * hbar * (second / total - mean * mean);
}

}  // namespace grw::testing
