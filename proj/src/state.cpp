#include "grwlab/state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "grwlab/error.hpp"
#include "grwlab/fft.hpp"

namespace grw {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ZeroNorm: return "ZeroNorm";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::MassMismatch: return "MassMismatch";
        case ErrorCode::DegenerateRegion: return "DegenerateRegion";
        case ErrorCode::ZeroProfile: return "ZeroProfile";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::BoundaryContamination: return "BoundaryContamination";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// Grid1D

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_points_(n_points), dx_(0.0) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
        throw Error(ErrorCode::InvalidArgument, "grid requires finite x_max > x_min");
    if (n_points < 2) throw Error(ErrorCode::InvalidArgument, "grid requires n_points >= 2");
    dx_ = (x_max - x_min) / static_cast<double>(n_points);
}

std::vector<double> Grid1D::coordinates() const {
    std::vector<double> xs(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) xs[i] = x(i);
    return xs;
}

double Grid1D::displacement(double x, double z) const noexcept {
    const double length = x_max_ - x_min_;
    double d = x - z;
    d -= length * std::round(d / length);
    return d;
}

std::size_t Grid1D::nearest_index(double x) const noexcept {
    const double n = static_cast<double>(n_points_);
    double index = std::round((x - x_min_) / dx_);
    index -= n * std::floor(index / n);
    return static_cast<std::size_t>(index) % n_points_;
}

std::vector<double> Grid1D::wavenumbers() const {
    std::vector<double> k(n_points_);
    const double dk = 2.0 * std::numbers::pi / length();
    const auto n = static_cast<std::ptrdiff_t>(n_points_);
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const std::ptrdiff_t m = (j < (n + 1) / 2) ? j : j - n;
        k[static_cast<std::size_t>(j)] = dk * static_cast<double>(m);
    }
    return k;
}

// ---------------------------------------------------------------------------
// PhysicsParams

void PhysicsParams::validate() const {
    auto check = [](double v, const char* name) {
        if (!std::isfinite(v) || v <= 0.0)
            throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be finite and > 0");
    };
    check(hbar, "hbar");
    check(mass, "mass");
    check(lambda, "lambda");
    check(sigma, "sigma");
}

// ---------------------------------------------------------------------------
// WaveFunction1D

WaveFunction1D::WaveFunction1D(Grid1D grid, ComplexVector amplitudes)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != grid_.size())
        throw Error(ErrorCode::InvalidArgument, "amplitude count does not match grid size");
}

WaveFunction1D WaveFunction1D::gaussian(const Grid1D& grid, double x0, double width, double k0) {
    if (!(width > 0.0)) throw Error(ErrorCode::InvalidArgument, "packet width must be > 0");
    ComplexVector amps(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = grid.displacement(grid.x(i), x0);
        amps[i] = std::exp(-d * d / (4.0 * width * width)) * std::polar(1.0, k0 * grid.x(i));
    }
    return normalize(WaveFunction1D(grid, std::move(amps)));
}

WaveFunction1D WaveFunction1D::uniform(const Grid1D& grid) {
    return normalize(WaveFunction1D(grid, ComplexVector(grid.size(), Complex(1.0, 0.0))));
}

double WaveFunction1D::norm_squared() const noexcept {
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return sum * grid_.dx();
}

WaveFunction1D normalize(const WaveFunction1D& psi) {
    const double n2 = psi.norm_squared();
    if (!(n2 >= kZeroNormThreshold)) throw Error(ErrorCode::ZeroNorm, "state has vanishing norm");
    const double scale = 1.0 / std::sqrt(n2);
    ComplexVector amps(psi.amplitudes().begin(), psi.amplitudes().end());
    for (auto& a : amps) a *= scale;
    return WaveFunction1D(psi.grid(), std::move(amps));
}

std::vector<double> mod_square_density(const WaveFunction1D& psi) {
    std::vector<double> rho(psi.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(psi[i]);
    return rho;
}

ComplexVector momentum_representation(const WaveFunction1D& psi) { return fft::forward(psi.amplitudes()); }

ComplexVector position_representation(std::span<const Complex> momentum) { return fft::inverse(momentum); }

Moments position_moments(const Grid1D& grid, std::span<const double> density) {
    double total = 0.0, first = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        total += density[i];
        first += density[i] * grid.x(i);
    }
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroNorm, "density has no mass");
    const double mean = first / total;
    double second = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        const double d = grid.x(i) - mean;
        second += density[i] * d * d;
    }
    return {mean, second / total};
}

// ---------------------------------------------------------------------------
// BranchedState

BranchedState::BranchedState(std::vector<Branch> branches, double branch_width)
    : branches_(std::move(branches)), branch_width_(branch_width) {
    if (branches_.empty()) throw Error(ErrorCode::InvalidArgument, "branched state needs at least one branch");
    if (!(branch_width_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "branch_width must be > 0");
    n_particles_ = branches_.front().positions.size();
    if (n_particles_ == 0) throw Error(ErrorCode::InvalidArgument, "branches need at least one particle");
    std::set<std::string> labels;
    double total = 0.0;
    for (const auto& b : branches_) {
        if (b.positions.size() != n_particles_)
            throw Error(ErrorCode::InvalidArgument, "branch '" + b.label + "' has a different particle count");
        if (!labels.insert(b.label).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate branch label '" + b.label + "'");
        for (double x : b.positions)
            if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteInput, "non-finite branch position");
        if (!std::isfinite(b.weight.real()) || !std::isfinite(b.weight.imag()))
            throw Error(ErrorCode::NonFiniteInput, "non-finite branch weight");
        total += std::norm(b.weight);
    }
    if (std::abs(total - 1.0) > kNormTolerance)
        throw Error(ErrorCode::NotNormalized, "branch weights must satisfy sum |w|^2 = 1");
}

const Branch& BranchedState::branch(std::size_t k) const {
    if (k >= branches_.size()) throw Error(ErrorCode::IndexOutOfRange, "branch index out of range");
    return branches_[k];
}

std::vector<double> BranchedState::mod_square_weights() const {
    std::vector<double> w(branches_.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::norm(branches_[k].weight);
    return w;
}

std::size_t BranchedState::index_of(const std::string& label) const {
    for (std::size_t k = 0; k < branches_.size(); ++k)
        if (branches_[k].label == label) return k;
    throw Error(ErrorCode::IndexOutOfRange, "no branch labelled '" + label + "'");
}

BranchedState BranchedState::with_weights(std::span<const Complex> weights) const {
    if (weights.size() != branches_.size())
        throw Error(ErrorCode::InvalidArgument, "weight count does not match branch count");
    double total = 0.0;
    for (const auto& w : weights) total += std::norm(w);
    if (!(total >= kZeroNormThreshold)) throw Error(ErrorCode::ZeroNorm, "all branch weights vanished");
    const double scale = 1.0 / std::sqrt(total);
    auto branches = branches_;
    for (std::size_t k = 0; k < branches.size(); ++k) branches[k].weight = weights[k] * scale;
    return BranchedState(std::move(branches), branch_width_);
}

double branch_distance(const BranchedState& state, std::size_t j, std::size_t k, std::size_t particle) {
    if (particle >= state.n_particles()) throw Error(ErrorCode::IndexOutOfRange, "particle index out of range");
    return std::abs(state.branch(j).positions[particle] - state.branch(k).positions[particle]);
}

}  // namespace grw
