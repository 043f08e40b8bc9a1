#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace grw {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

// Uniform periodic grid: point i sits at x_min + i*dx, and x_max is identified with x_min.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n_points);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_points_; }
    double length() const noexcept { return x_max_ - x_min_; }
    double dx() const noexcept { return dx_; }
    double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }
    std::vector<double> coordinates() const;

    // Signed displacement x - z under the minimum-image convention of the periodic box.
    double displacement(double x, double z) const noexcept;

    // Grid index whose coordinate is nearest to x (periodic wrap).
    std::size_t nearest_index(double x) const noexcept;

    // Angular wavenumbers in FFT order: 2*pi*j/L for j < n/2, negative frequencies above.
    std::vector<double> wavenumbers() const;

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_points_;
    double dx_;
};

// Fundamental constants and GRW parameters. Defaults are SI with the GRW rate and width;
// scenarios routinely rescale to order-one units.
struct PhysicsParams {
    double hbar = 1.054571817e-34;  // J s
    double mass = 1.67262192369e-27;  // kg, one nucleon
    double lambda = 1e-16;  // s^-1 per particle
    double sigma = 1e-5;  // m

    static PhysicsParams si() { return {}; }
    static PhysicsParams scaled() { return {1.0, 1.0, 1.0, 1.0}; }

    // Throws InvalidArgument unless every field is finite and strictly positive.
    void validate() const;
};

class WaveFunction1D {
public:
    // Holds the amplitudes as given; use normalize() or the factories for unit-norm states.
    WaveFunction1D(Grid1D grid, ComplexVector amplitudes);

    // exp(-(x-x0)^2/(4 s^2)) * exp(i k0 x), normalized. Position variance of the density is s^2.
    static WaveFunction1D gaussian(const Grid1D& grid, double x0, double width, double k0 = 0.0);
    static WaveFunction1D uniform(const Grid1D& grid);

    const Grid1D& grid() const noexcept { return grid_; }
    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    std::size_t size() const noexcept { return amplitudes_.size(); }
    const Complex& operator[](std::size_t i) const noexcept { return amplitudes_[i]; }

    // sum |psi_i|^2 dx
    double norm_squared() const noexcept;

private:
    Grid1D grid_;
    ComplexVector amplitudes_;
};

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kZeroNormThreshold = 1e-30;

WaveFunction1D normalize(const WaveFunction1D& psi);

// Pointwise |psi_i|^2 (units 1/m); sums (times dx) to the norm squared.
std::vector<double> mod_square_density(const WaveFunction1D& psi);

// Unitary DFT, psi_k = N^{-1/2} sum_j psi_j exp(-2 pi i j k / N). Ordering matches Grid1D::wavenumbers().
ComplexVector momentum_representation(const WaveFunction1D& psi);
ComplexVector position_representation(std::span<const Complex> momentum);

// Mean and variance of a density sampled on the grid, using plain (non-periodic) coordinates.
struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};
Moments position_moments(const Grid1D& grid, std::span<const double> density);

// Closed interval [lo, hi] on the x-axis.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    double width() const noexcept { return hi - lo; }
};

struct Branch {
    Complex weight;
    std::string label;
    std::vector<double> positions;  // one entry per particle, m
};

// Decohered superposition of point-localized product configurations. Branches are exactly
// orthogonal; only their weights and positions enter the dynamics.
class BranchedState {
public:
    // Validates weight closure, label uniqueness and a common particle count.
    BranchedState(std::vector<Branch> branches, double branch_width);

    const std::vector<Branch>& branches() const noexcept { return branches_; }
    const Branch& branch(std::size_t k) const;
    std::size_t size() const noexcept { return branches_.size(); }
    std::size_t n_particles() const noexcept { return n_particles_; }
    double branch_width() const noexcept { return branch_width_; }

    std::vector<double> mod_square_weights() const;
    std::size_t index_of(const std::string& label) const;

    // Same branches with replaced weights; renormalizes and revalidates.
    BranchedState with_weights(std::span<const Complex> weights) const;

private:
    std::vector<Branch> branches_;
    std::size_t n_particles_ = 0;
    double branch_width_ = 0.0;
};

double branch_distance(const BranchedState& state, std::size_t j, std::size_t k, std::size_t particle);

}  // namespace grw
