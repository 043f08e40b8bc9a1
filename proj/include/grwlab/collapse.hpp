#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "grwlab/propagator.hpp"
#include "grwlab/rng.hpp"
#include "grwlab/state.hpp"

namespace grw {

struct IdealKernel {};
struct GaussianKernel {
    double sigma;
};
// Gaussian interior profile of width sigma, cut off beyond |x - z| > width.
struct CompactSupportKernel {
    double sigma;
    double width;
};

class CollapseKernel {
public:
    using Variant = std::variant<IdealKernel, GaussianKernel, CompactSupportKernel>;

    static CollapseKernel ideal() { return CollapseKernel(IdealKernel{}); }
    static CollapseKernel gaussian(double sigma);
    static CollapseKernel compact_support(double sigma, double width);

    const Variant& variant() const noexcept { return kernel_; }
    bool is_ideal() const noexcept { return std::holds_alternative<IdealKernel>(kernel_); }
    bool is_gaussian() const noexcept { return std::holds_alternative<GaussianKernel>(kernel_); }
    bool is_compact() const noexcept { return std::holds_alternative<CompactSupportKernel>(kernel_); }
    std::string name() const;

    // Unnormalized amplitude multiplier at distance d from the center: exp(-d^2 / (4 sigma^2)),
    // zero beyond the window for compact support. Ideal is 1 at d == 0 and 0 elsewhere.
    double amplitude(double distance) const noexcept;

    // c^2 such that c^2 * integral amplitude(u)^2 du = 1, making the center density integrate to 1.
    // Undefined (returns 0) for the ideal kernel.
    double density_normalization() const noexcept;

    // 0 for ideal.
    double sigma() const noexcept;
    // Window half-width beyond which amplitude is exactly zero (infinity for Gaussian, 0 for ideal).
    double support() const noexcept;

    friend bool operator==(const CollapseKernel& a, const CollapseKernel& b);

private:
    explicit CollapseKernel(Variant kernel) : kernel_(kernel) {}
    Variant kernel_;
};

struct CollapseEvent {
    double time = 0.0;
    std::size_t particle = 0;
    double center = 0.0;
    CollapseKernel kernel = CollapseKernel::ideal();
    std::optional<std::string> selected_branch;
    // Branch mod-square weights for branched states; for grid states the pair
    // (mass inside the localization window around the center, mass outside).
    std::vector<double> pre_weights;
    std::vector<double> post_weights;
};

// ---------------------------------------------------------------------------
// Hit timing

// Total hit rate N * lambda.
double hit_rate(double n_particles, double lambda) noexcept;

struct HitSample {
    double wait = 0.0;  // s
    std::size_t particle = 0;
};

// Exponential waiting time at rate n_particles * lambda; the struck particle is uniform.
HitSample sample_hit_time(std::size_t n_particles, const PhysicsParams& params, RngStream& rng);

// ---------------------------------------------------------------------------
// Grid-level hits

// Center density p(z_j) = || L_{z_j} psi ||^2 at every grid point (per unit length).
// For the ideal kernel this is the Born density |psi|^2.
std::vector<double> center_density(const WaveFunction1D& psi, const CollapseKernel& kernel);

// Inverse-CDF sampler over the grid-point center density; build once, draw many.
class CenterSampler {
public:
    CenterSampler(const WaveFunction1D& psi, const CollapseKernel& kernel);
    double sample(RngStream& rng) const;
    const std::vector<double>& density() const noexcept { return density_; }

private:
    Grid1D grid_;
    std::vector<double> density_;
    std::vector<double> cdf_;
};

double sample_center(const WaveFunction1D& psi, const CollapseKernel& kernel, RngStream& rng);

// Multiplies by the kernel centered at z and renormalizes.
WaveFunction1D apply_hit(const WaveFunction1D& psi, double z, const CollapseKernel& kernel);

// ---------------------------------------------------------------------------
// Branch-level hits

struct BranchHit {
    BranchedState state;
    CollapseEvent event;
};

// Born-selects branch k, centers the hit on its particle position and rescales every branch by
// the kernel amplitude at its distance from that center.
BranchHit apply_branch_hit(const BranchedState& state, std::size_t particle, const CollapseKernel& kernel,
                           RngStream& rng);

// Same, with the selected branch fixed (for oracle checks and scenario bookkeeping).
BranchHit apply_branch_hit_at(const BranchedState& state, std::size_t particle, std::size_t selected,
                              const CollapseKernel& kernel);

// ---------------------------------------------------------------------------
// Full GRW process

template <typename State>
struct GrwRun {
    State state;
    std::vector<CollapseEvent> events;
};

struct GrwOptions {
    // Largest split-step used when a potential is present.
    double max_step = 1e-2;
    EvolveOptions evolve{};
};

// Branched states carry fixed positions, so only the hits change them.
GrwRun<BranchedState> run_grw(const BranchedState& initial, double duration, const CollapseKernel& kernel,
                              const PhysicsParams& params, RngStream& rng);

GrwRun<WaveFunction1D> run_grw(const WaveFunction1D& initial, double duration, const CollapseKernel& kernel,
                               const PhysicsParams& params, RngStream& rng, const Potential1D* potential = nullptr,
                               const GrwOptions& options = {});

}  // namespace grw
