#include "grwlab/ontology.hpp"

#include <algorithm>
#include <cmath>

#include "grwlab/error.hpp"
#include "grwlab/fft.hpp"

namespace grw {
namespace {

void check_q(double q) {
    if (!(q > 0.0 && q < 0.5)) throw Error(ErrorCode::InvalidArgument, "q must lie in (0, 0.5)");
}

void check_region(const Interval& region) {
    if (!(region.hi > region.lo)) throw Error(ErrorCode::DegenerateRegion, "region must satisfy hi > lo");
}

FuzzyLinkVerdict verdict_from(const Grid1D& grid, std::span<const double> density, const Interval& region, double q) {
    check_q(q);
    check_region(region);
    double inside = 0.0, total = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        total += density[i];
        if (region.contains(grid.x(i))) inside += density[i];
    }
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroNorm, "density has no mass");
    FuzzyLinkVerdict v;
    v.region = region;
    v.q = q;
    v.fraction_inside = std::clamp(inside / total, 0.0, 1.0);
    v.verdict = classify_fraction(v.fraction_inside, q);
    return v;
}

// Grid-sampled Gaussian density of standard deviation `width` centered at x0, normalized so that
// sum * dx = 1 exactly. Falls back to the nearest cell when the bump is narrower than the grid.
std::vector<double> bump(const Grid1D& grid, double x0, double width) {
    std::vector<double> b(grid.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double d = grid.displacement(grid.x(i), x0);
        b[i] = std::exp(-d * d / (2.0 * width * width));
        sum += b[i];
    }
    if (!(sum > 0.0)) {
        b[grid.nearest_index(x0)] = 1.0;
        sum = 1.0;
    }
    const double scale = 1.0 / (sum * grid.dx());
    for (auto& v : b) v *= scale;
    return b;
}

void check_masses(std::span<const double> masses, std::size_t n_particles) {
    if (masses.size() != n_particles)
        throw Error(ErrorCode::MassMismatch, "expected " + std::to_string(n_particles) + " masses, got " +
                                                 std::to_string(masses.size()));
    for (double m : masses)
        if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorCode::InvalidArgument, "masses must be > 0");
}

}  // namespace

double MatterDensityField::total_mass() const noexcept {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * grid.dx();
}

MatterDensityField matter_density(const WaveFunction1D& psi, std::span<const double> masses) {
    check_masses(masses, 1);
    auto rho = mod_square_density(psi);
    for (auto& r : rho) r *= masses[0];
    return {psi.grid(), std::move(rho)};
}

MatterDensityField matter_density(const BranchedState& state, std::span<const double> masses, const Grid1D& grid) {
    check_masses(masses, state.n_particles());
    std::vector<double> field(grid.size(), 0.0);
    for (const auto& branch : state.branches()) {
        const double w = std::norm(branch.weight);
        if (w == 0.0) continue;
        for (std::size_t p = 0; p < masses.size(); ++p) {
            const auto b = bump(grid, branch.positions[p], state.branch_width());
            for (std::size_t i = 0; i < field.size(); ++i) field[i] += w * masses[p] * b[i];
        }
    }
    return {grid, std::move(field)};
}

MatterDensityField branch_matter_profile(const BranchedState& state, std::size_t branch,
                                         std::span<const double> masses, const Grid1D& grid) {
    check_masses(masses, state.n_particles());
    const auto& positions = state.branch(branch).positions;
    std::vector<double> field(grid.size(), 0.0);
    for (std::size_t p = 0; p < masses.size(); ++p) {
        const auto b = bump(grid, positions[p], state.branch_width());
        for (std::size_t i = 0; i < field.size(); ++i) field[i] += masses[p] * b[i];
    }
    return {grid, std::move(field)};
}

std::string_view to_string(Location location) {
    switch (location) {
        case Location::LocatedInside: return "located_inside";
        case Location::LocatedOutside: return "located_outside";
        case Location::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

Location classify_fraction(double fraction_inside, double q) {
    check_q(q);
    if (fraction_inside > 1.0 - q) return Location::LocatedInside;
    if (fraction_inside < q) return Location::LocatedOutside;
    return Location::Indeterminate;
}

FuzzyLinkVerdict fuzzy_link(const WaveFunction1D& psi, const Interval& region, double q) {
    const auto rho = mod_square_density(psi);
    return verdict_from(psi.grid(), rho, region, q);
}

FuzzyLinkVerdict fuzzy_link(const MatterDensityField& field, const Interval& region, double q) {
    return verdict_from(field.grid, field.values, region, q);
}

double tail_mass(const WaveFunction1D& psi, const Interval& region) {
    check_region(region);
    double outside = 0.0, total = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi[i]);
        total += p;
        if (!region.contains(psi.grid().x(i))) outside += p;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroNorm, "state has vanishing norm");
    return std::clamp(outside / total, 0.0, 1.0);
}

double isomorphism_score(std::span<const double> profile_a, std::span<const double> profile_b) {
    if (profile_a.size() != profile_b.size()) throw Error(ErrorCode::InvalidArgument, "profiles differ in length");
    auto unit = [](std::span<const double> p) {
        double ss = 0.0;
        for (double v : p) ss += v * v;
        if (!(ss > 0.0)) throw Error(ErrorCode::ZeroProfile, "profile has zero norm");
        const double inv = 1.0 / std::sqrt(ss);
        std::vector<double> u(p.begin(), p.end());
        for (auto& v : u) v *= inv;
        return u;
    };
    const auto a = unit(profile_a);
    const auto b = unit(profile_b);
    const auto corr = fft::cyclic_cross_correlation(a, b);
    const double best = *std::max_element(corr.begin(), corr.end());
    return std::clamp(best, 0.0, 1.0);
}

double displaced_tail_center(double tail_center, double collapse_center, double tail_width, double sigma) {
    if (!(tail_width > 0.0) || !(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "widths must be > 0");
    const double s2 = tail_width * tail_width;
    const double sig2 = sigma * sigma;
    return (tail_center * sig2 + collapse_center * s2) / (sig2 + s2);
}

double peak_displacement(double tail_center, double collapse_center, double tail_width, double sigma) {
    return displaced_tail_center(tail_center, collapse_center, tail_width, sigma) - tail_center;
}

double numeric_tail_peak(const WaveFunction1D& tail_component, double collapse_center, const CollapseKernel& kernel) {
    const auto& grid = tail_component.grid();
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < tail_component.size(); ++i) {
        const double k = kernel.amplitude(grid.displacement(grid.x(i), collapse_center));
        const double v = std::norm(tail_component[i]) * k * k;
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    return grid.x(best);
}

double kinetic_energy(const WaveFunction1D& psi, const PhysicsParams& params) {
    const auto momentum = momentum_representation(psi);
    const auto k = psi.grid().wavenumbers();
    double sum = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) sum += k[j] * k[j] * std::norm(momentum[j]);
    return params.hbar * params.hbar / (2.0 * params.mass) * sum * psi.grid().dx();
}

double energy_expectation(const WaveFunction1D& psi, const PhysicsParams& params, const Potential1D* potential) {
    double energy = kinetic_energy(psi, params);
    if (potential != nullptr) {
        if (potential->size() != psi.size()) throw Error(ErrorCode::InvalidArgument, "potential length does not match state");
        double pot = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) pot += potential->values()[i] * std::norm(psi[i]);
        energy += pot * psi.grid().dx();
    }
    return energy;
}

EnergyGain energy_gain_per_hit(const WaveFunction1D& psi, const CollapseKernel& kernel, const PhysicsParams& params,
                               RngStream& rng, std::size_t n_trials, const Potential1D* potential) {
    if (n_trials < 1) throw Error(ErrorCode::InvalidArgument, "n_trials must be >= 1");
    const double before = energy_expectation(psi, params, potential);
    const CenterSampler sampler(psi, kernel);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t t = 0; t < n_trials; ++t) {
        const double z = sampler.sample(rng);
        const double gain = energy_expectation(apply_hit(psi, z, kernel), params, potential) - before;
        sum += gain;
        sum_sq += gain * gain;
    }
    const auto n = static_cast<double>(n_trials);
    EnergyGain result;
    result.n_trials = n_trials;
    result.mean = sum / n;
    const double var = n > 1.0 ? std::max(0.0, (sum_sq - n * result.mean * result.mean) / (n - 1.0)) : 0.0;
    result.stddev = std::sqrt(var);
    result.standard_error = result.stddev / std::sqrt(n);
    return result;
}

}  // namespace grw
