#pragma once

#include <string>
#include <vector>

#include "grwlab/state.hpp"

namespace grw {

class Potential1D {
public:
    Potential1D(const Grid1D& grid, std::vector<double> values);

    static Potential1D zero(const Grid1D& grid);
    // (1/2) m omega^2 (x - x0)^2
    static Potential1D harmonic(const Grid1D& grid, double mass, double omega, double x0 = 0.0);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

enum class BoundaryPolicy { Ignore, Warn, Throw };

struct EvolveOptions {
    BoundaryPolicy boundary = BoundaryPolicy::Warn;
    // Warnings are appended here when non-null; otherwise written to stderr.
    std::vector<std::string>* warnings = nullptr;
};

inline constexpr std::size_t kBoundaryCells = 5;
inline constexpr double kBoundaryMassLimit = 1e-6;

// Probability mass within `cells` grid cells of either end of the box.
double boundary_mass(const WaveFunction1D& psi, std::size_t cells = kBoundaryCells);

// Exact free evolution: every momentum component picks up exp(-i hbar k^2 dt / 2m).
// Negative dt runs the evolution backwards.
WaveFunction1D evolve_free(const WaveFunction1D& psi, const PhysicsParams& params, double dt,
                           const EvolveOptions& options = {});

// Strang splitting: half potential kick, full kinetic drift, half potential kick, n_steps times.
WaveFunction1D evolve(const WaveFunction1D& psi, const Potential1D& potential, const PhysicsParams& params,
                      double dt, std::size_t n_steps, const EvolveOptions& options = {});

}  // namespace grw
