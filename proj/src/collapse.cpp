#include "grwlab/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "grwlab/error.hpp"
#include "grwlab/fft.hpp"

namespace grw {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Compact-support densities below this fraction of the peak are FFT round-off.
constexpr double kCompactDensityFloor = 1e-12;

double window_half_width(const CollapseKernel& kernel, const Grid1D& grid) {
    return std::visit(Overloaded{[&](const IdealKernel&) { return 0.5 * grid.dx(); },
                                 [](const GaussianKernel& g) { return 2.0 * g.sigma; },
                                 [](const CompactSupportKernel& c) { return c.width; }},
                      kernel.variant());
}

std::vector<double> window_weights(const WaveFunction1D& psi, double z, double half_width) {
    double inside = 0.0, total = 0.0;
    const auto& grid = psi.grid();
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi[i]);
        total += p;
        if (std::abs(grid.displacement(grid.x(i), z)) <= half_width) inside += p;
    }
    if (total <= 0.0) return {0.0, 0.0};
    return {inside / total, (total - inside) / total};
}

}  // namespace

// ---------------------------------------------------------------------------
// CollapseKernel

CollapseKernel CollapseKernel::gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidArgument, "kernel sigma must be > 0");
    return CollapseKernel(GaussianKernel{sigma});
}

CollapseKernel CollapseKernel::compact_support(double sigma, double width) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidArgument, "kernel sigma must be > 0");
    if (!(width > 0.0) || !std::isfinite(width)) throw Error(ErrorCode::InvalidArgument, "kernel window W must be > 0");
    return CollapseKernel(CompactSupportKernel{sigma, width});
}

std::string CollapseKernel::name() const {
    return std::visit(Overloaded{[](const IdealKernel&) { return std::string("ideal"); },
                                 [](const GaussianKernel&) { return std::string("gaussian"); },
                                 [](const CompactSupportKernel&) { return std::string("compact_support"); }},
                      kernel_);
}

double CollapseKernel::amplitude(double distance) const noexcept {
    return std::visit(Overloaded{[&](const IdealKernel&) { return distance == 0.0 ? 1.0 : 0.0; },
                                 [&](const GaussianKernel& g) {
                                     return std::exp(-distance * distance / (4.0 * g.sigma * g.sigma));
                                 },
                                 [&](const CompactSupportKernel& c) {
                                     if (std::abs(distance) > c.width) return 0.0;
                                     return std::exp(-distance * distance / (4.0 * c.sigma * c.sigma));
                                 }},
                      kernel_);
}

double CollapseKernel::density_normalization() const noexcept {
    const double gauss_norm = [&] {
        const double s = sigma();
        return s > 0.0 ? 1.0 / (std::sqrt(2.0 * std::numbers::pi) * s) : 0.0;
    }();
    return std::visit(Overloaded{[](const IdealKernel&) { return 0.0; },
                                 [&](const GaussianKernel&) { return gauss_norm; },
                                 [&](const CompactSupportKernel& c) {
                                     return gauss_norm / std::erf(c.width / (std::numbers::sqrt2 * c.sigma));
                                 }},
                      kernel_);
}

double CollapseKernel::sigma() const noexcept {
    return std::visit(Overloaded{[](const IdealKernel&) { return 0.0; }, [](const GaussianKernel& g) { return g.sigma; },
                                 [](const CompactSupportKernel& c) { return c.sigma; }},
                      kernel_);
}

double CollapseKernel::support() const noexcept {
    return std::visit(Overloaded{[](const IdealKernel&) { return 0.0; },
                                 [](const GaussianKernel&) { return std::numeric_limits<double>::infinity(); },
                                 [](const CompactSupportKernel& c) { return c.width; }},
                      kernel_);
}

bool operator==(const CollapseKernel& a, const CollapseKernel& b) {
    if (a.kernel_.index() != b.kernel_.index()) return false;
    return a.sigma() == b.sigma() && a.support() == b.support();
}

// ---------------------------------------------------------------------------
// Hit timing

double hit_rate(double n_particles, double lambda) noexcept { return n_particles * lambda; }

HitSample sample_hit_time(std::size_t n_particles, const PhysicsParams& params, RngStream& rng) {
    if (n_particles < 1) throw Error(ErrorCode::InvalidArgument, "need at least one particle");
    HitSample hit;
    hit.wait = rng.exponential(hit_rate(static_cast<double>(n_particles), params.lambda));
    hit.particle = rng.uniform_index(n_particles);
    return hit;
}

// ---------------------------------------------------------------------------
// Grid-level hits

std::vector<double> center_density(const WaveFunction1D& psi, const CollapseKernel& kernel) {
    const auto& grid = psi.grid();
    auto rho = mod_square_density(psi);
    if (kernel.is_ideal()) return rho;

    const double dx = grid.dx();
    for (auto& r : rho) r *= dx;
    const double c2 = kernel.density_normalization();
    std::vector<double> profile(grid.size());
    for (std::size_t m = 0; m < profile.size(); ++m) {
        const double a = kernel.amplitude(grid.displacement(grid.x(m), grid.x_min()));
        profile[m] = c2 * a * a;
    }
    auto p = fft::cyclic_convolution(rho, profile);
    double peak = 0.0;
    for (double v : p) peak = std::max(peak, v);
    const double floor = kernel.is_compact() ? kCompactDensityFloor * peak : 0.0;
    for (auto& v : p)
        if (v <= floor) v = 0.0;
    return p;
}

CenterSampler::CenterSampler(const WaveFunction1D& psi, const CollapseKernel& kernel)
    : grid_(psi.grid()), density_(center_density(psi, kernel)), cdf_(density_.size()) {
    double running = 0.0;
    for (std::size_t j = 0; j < density_.size(); ++j) {
        running += density_[j];
        cdf_[j] = running;
    }
    if (!(running > 0.0)) throw Error(ErrorCode::ZeroNorm, "center density vanishes everywhere");
}

double CenterSampler::sample(RngStream& rng) const {
    const double u = rng.uniform() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return grid_.x(static_cast<std::size_t>(it - cdf_.begin()));
}

double sample_center(const WaveFunction1D& psi, const CollapseKernel& kernel, RngStream& rng) {
    return CenterSampler(psi, kernel).sample(rng);
}

WaveFunction1D apply_hit(const WaveFunction1D& psi, double z, const CollapseKernel& kernel) {
    const auto& grid = psi.grid();
    ComplexVector amps(psi.amplitudes().begin(), psi.amplitudes().end());
    if (kernel.is_ideal()) {
        const std::size_t keep = grid.nearest_index(z);
        for (std::size_t i = 0; i < amps.size(); ++i)
            if (i != keep) amps[i] = 0.0;
    } else {
        for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= kernel.amplitude(grid.displacement(grid.x(i), z));
    }
    return normalize(WaveFunction1D(grid, std::move(amps)));
}

// ---------------------------------------------------------------------------
// Branch-level hits

BranchHit apply_branch_hit_at(const BranchedState& state, std::size_t particle, std::size_t selected,
                              const CollapseKernel& kernel) {
    if (particle >= state.n_particles()) throw Error(ErrorCode::IndexOutOfRange, "particle index out of range");
    const Branch& chosen = state.branch(selected);
    ComplexVector weights(state.size());
    for (std::size_t j = 0; j < state.size(); ++j)
        weights[j] = state.branches()[j].weight * kernel.amplitude(branch_distance(state, j, selected, particle));

    CollapseEvent event;
    event.particle = particle;
    event.center = chosen.positions[particle];
    event.kernel = kernel;
    event.selected_branch = chosen.label;
    event.pre_weights = state.mod_square_weights();
    BranchedState next = state.with_weights(weights);
    event.post_weights = next.mod_square_weights();
    return {std::move(next), std::move(event)};
}

BranchHit apply_branch_hit(const BranchedState& state, std::size_t particle, const CollapseKernel& kernel,
                           RngStream& rng) {
    const auto weights = state.mod_square_weights();
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = rng.uniform() * total;
    std::size_t selected = weights.size() - 1;
    double running = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        running += weights[k];
        if (u < running) {
            selected = k;
            break;
        }
    }
    // Round-off can leave u just above the final partial sum; never land on a zero-weight branch.
    while (weights[selected] == 0.0 && selected > 0) --selected;
    return apply_branch_hit_at(state, particle, selected, kernel);
}

// ---------------------------------------------------------------------------
// Full GRW process

GrwRun<BranchedState> run_grw(const BranchedState& initial, double duration, const CollapseKernel& kernel,
                              const PhysicsParams& params, RngStream& rng) {
    if (!(duration >= 0.0)) throw Error(ErrorCode::InvalidArgument, "duration must be >= 0");
    GrwRun<BranchedState> run{initial, {}};
    double t = 0.0;
    while (true) {
        const HitSample hit = sample_hit_time(initial.n_particles(), params, rng);
        if (t + hit.wait >= duration) break;
        t += hit.wait;
        auto [next, event] = apply_branch_hit(run.state, hit.particle, kernel, rng);
        event.time = t;
        run.state = std::move(next);
        run.events.push_back(std::move(event));
    }
    return run;
}

GrwRun<WaveFunction1D> run_grw(const WaveFunction1D& initial, double duration, const CollapseKernel& kernel,
                               const PhysicsParams& params, RngStream& rng, const Potential1D* potential,
                               const GrwOptions& options) {
    if (!(duration >= 0.0)) throw Error(ErrorCode::InvalidArgument, "duration must be >= 0");
    if (!(options.max_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "max_step must be > 0");

    auto advance = [&](const WaveFunction1D& psi, double span) {
        if (span <= 0.0) return psi;
        if (potential == nullptr) return evolve_free(psi, params, span, options.evolve);
        const auto steps = static_cast<std::size_t>(std::ceil(span / options.max_step));
        return evolve(psi, *potential, params, span / static_cast<double>(steps), steps, options.evolve);
    };

    GrwRun<WaveFunction1D> run{initial, {}};
    const double half_width = window_half_width(kernel, initial.grid());
    double t = 0.0;
    while (true) {
        const HitSample hit = sample_hit_time(1, params, rng);
        if (t + hit.wait >= duration) {
            run.state = advance(run.state, duration - t);
            break;
        }
        run.state = advance(run.state, hit.wait);
        t += hit.wait;
        CollapseEvent event;
        event.time = t;
        event.particle = hit.particle;
        event.kernel = kernel;
        event.center = sample_center(run.state, kernel, rng);
        event.pre_weights = window_weights(run.state, event.center, half_width);
        run.state = apply_hit(run.state, event.center, kernel);
        event.post_weights = window_weights(run.state, event.center, half_width);
        run.events.push_back(std::move(event));
    }
    return run;
}

}  // namespace grw
