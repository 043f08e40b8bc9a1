#include "grwlab/propagator.hpp"

#include <cmath>
#include <iostream>

#include "grwlab/error.hpp"
#include "grwlab/fft.hpp"

namespace grw {
namespace {

void require_finite(const WaveFunction1D& psi) {
    for (const auto& a : psi.amplitudes())
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw Error(ErrorCode::NonFiniteInput, "wavefunction contains non-finite amplitudes");
}

void police_boundary(const WaveFunction1D& psi, const EvolveOptions& options) {
    if (options.boundary == BoundaryPolicy::Ignore) return;
    const double mass = boundary_mass(psi);
    if (mass <= kBoundaryMassLimit) return;
    const std::string message = "density within " + std::to_string(kBoundaryCells) +
                                " cells of the boundary is " + std::to_string(mass) + " (limit 1e-6)";
    if (options.boundary == BoundaryPolicy::Throw) throw Error(ErrorCode::BoundaryContamination, message);
    if (options.warnings != nullptr)
        options.warnings->push_back("BoundaryContamination: " + message);
    else
        std::cerr << "warning: BoundaryContamination: " << message << '\n';
}

ComplexVector kinetic_phases(const Grid1D& grid, const PhysicsParams& params, double dt) {
    const auto k = grid.wavenumbers();
    ComplexVector phases(k.size());
    const double factor = params.hbar * dt / (2.0 * params.mass);
    for (std::size_t j = 0; j < k.size(); ++j) phases[j] = std::polar(1.0, -factor * k[j] * k[j]);
    return phases;
}

}  // namespace

Potential1D::Potential1D(const Grid1D& grid, std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() != grid.size()) throw Error(ErrorCode::InvalidArgument, "potential length does not match grid");
    for (double v : values_)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "potential contains non-finite values");
}

Potential1D Potential1D::zero(const Grid1D& grid) { return Potential1D(grid, std::vector<double>(grid.size(), 0.0)); }

Potential1D Potential1D::harmonic(const Grid1D& grid, double mass, double omega, double x0) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = grid.x(i) - x0;
        v[i] = 0.5 * mass * omega * omega * d * d;
    }
    return Potential1D(grid, std::move(v));
}

double boundary_mass(const WaveFunction1D& psi, std::size_t cells) {
    const std::size_t n = psi.size();
    const std::size_t edge = std::min(cells, n / 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < edge; ++i) sum += std::norm(psi[i]) + std::norm(psi[n - 1 - i]);
    return sum * psi.grid().dx();
}

WaveFunction1D evolve_free(const WaveFunction1D& psi, const PhysicsParams& params, double dt,
                           const EvolveOptions& options) {
    if (!std::isfinite(dt)) throw Error(ErrorCode::NonFiniteInput, "dt must be finite");
    require_finite(psi);
    if (dt == 0.0) return psi;
    auto amps = fft::forward(psi.amplitudes());
    const auto phases = kinetic_phases(psi.grid(), params, dt);
    for (std::size_t j = 0; j < amps.size(); ++j) amps[j] *= phases[j];
    fft::inverse_in_place(amps);
    WaveFunction1D out(psi.grid(), std::move(amps));
    police_boundary(out, options);
    return out;
}

WaveFunction1D evolve(const WaveFunction1D& psi, const Potential1D& potential, const PhysicsParams& params,
                      double dt, std::size_t n_steps, const EvolveOptions& options) {
    if (!std::isfinite(dt)) throw Error(ErrorCode::NonFiniteInput, "dt must be finite");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "evolve requires dt > 0");
    if (n_steps < 1) throw Error(ErrorCode::InvalidArgument, "evolve requires n_steps >= 1");
    if (potential.size() != psi.size()) throw Error(ErrorCode::InvalidArgument, "potential length does not match state");
    require_finite(psi);

    const auto kinetic = kinetic_phases(psi.grid(), params, dt);
    ComplexVector half_kick(psi.size());
    for (std::size_t i = 0; i < half_kick.size(); ++i)
        half_kick[i] = std::polar(1.0, -potential.values()[i] * dt / (2.0 * params.hbar));

    ComplexVector amps(psi.amplitudes().begin(), psi.amplitudes().end());
    for (std::size_t step = 0; step < n_steps; ++step) {
        for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= half_kick[i];
        fft::forward_in_place(amps);
        for (std::size_t j = 0; j < amps.size(); ++j) amps[j] *= kinetic[j];
        fft::inverse_in_place(amps);
        for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= half_kick[i];
    }
    WaveFunction1D out(psi.grid(), std::move(amps));
    police_boundary(out, options);
    return out;
}

}  // namespace grw
