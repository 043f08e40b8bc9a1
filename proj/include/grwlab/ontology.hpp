#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "grwlab/collapse.hpp"
#include "grwlab/propagator.hpp"
#include "grwlab/state.hpp"

namespace grw {

// Mass per unit length on the grid (kg/m in 1D).
struct MatterDensityField {
    Grid1D grid;
    std::vector<double> values;

    double total_mass() const noexcept;
};

// m |psi(x)|^2 for a single particle; `masses` must hold exactly one entry.
MatterDensityField matter_density(const WaveFunction1D& psi, std::span<const double> masses);

// sum_k |w_k|^2 sum_p m_p * bump(x - x_{k,p}), each bump a grid-normalized Gaussian density of
// standard deviation branch_width.
MatterDensityField matter_density(const BranchedState& state, std::span<const double> masses, const Grid1D& grid);

// Matter density of a single branch as if it carried all the weight.
MatterDensityField branch_matter_profile(const BranchedState& state, std::size_t branch,
                                         std::span<const double> masses, const Grid1D& grid);

enum class Location { LocatedInside, LocatedOutside, Indeterminate };
std::string_view to_string(Location location);

inline constexpr double kDefaultFuzzyQ = 0.1;

struct FuzzyLinkVerdict {
    Interval region;
    double fraction_inside = 0.0;
    double q = kDefaultFuzzyQ;
    Location verdict = Location::Indeterminate;
};

// Inside iff fraction > 1 - q, outside iff fraction < q, else indeterminate.
Location classify_fraction(double fraction_inside, double q);

// Mod-square reading.
FuzzyLinkVerdict fuzzy_link(const WaveFunction1D& psi, const Interval& region, double q = kDefaultFuzzyQ);
// Matter-density reading.
FuzzyLinkVerdict fuzzy_link(const MatterDensityField& field, const Interval& region, double q = kDefaultFuzzyQ);

// Fraction of sum |psi|^2 lying outside the region. Exactly zero when every outside amplitude is zero.
double tail_mass(const WaveFunction1D& psi, const Interval& region);

// Maximum over cyclic shifts of the correlation of the two L2-normalized profiles. Equals 1 for
// translates and positive rescalings.
double isomorphism_score(std::span<const double> profile_a, std::span<const double> profile_b);

// Closed-form new tail center (y sigma^2 + x s^2) / (sigma^2 + s^2) after a Gaussian hit at x on
// a packet of width s centered at y.
double displaced_tail_center(double tail_center, double collapse_center, double tail_width, double sigma);
double peak_displacement(double tail_center, double collapse_center, double tail_width, double sigma);

// Grid argmax of |kernel(x - center) * tail(x)|^2 where `tail` is the pre-hit tail component.
double numeric_tail_peak(const WaveFunction1D& tail_component, double collapse_center, const CollapseKernel& kernel);

// <H> = sum_k (hbar^2 k^2 / 2m) |psi_k|^2 dx + sum_i V_i |psi_i|^2 dx
double kinetic_energy(const WaveFunction1D& psi, const PhysicsParams& params);
double energy_expectation(const WaveFunction1D& psi, const PhysicsParams& params,
                          const Potential1D* potential = nullptr);

struct EnergyGain {
    double mean = 0.0;
    double stddev = 0.0;
    double standard_error = 0.0;
    std::size_t n_trials = 0;
};

// Mean and spread of E(after hit) - E(before) over centers sampled from the exact center density.
EnergyGain energy_gain_per_hit(const WaveFunction1D& psi, const CollapseKernel& kernel, const PhysicsParams& params,
                               RngStream& rng, std::size_t n_trials, const Potential1D* potential = nullptr);

}  // namespace grw
