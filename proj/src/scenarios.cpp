#include "grwlab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "grwlab/error.hpp"
#include "grwlab/propagator.hpp"

namespace grw::scenarios {
namespace {

using nlohmann::ordered_json;

ordered_json complex_json(Complex c) { return ordered_json::array({c.real(), c.imag()}); }

ordered_json kernel_json(const CollapseKernel& k) {
    ordered_json j;
    j["variant"] = k.name();
    if (!k.is_ideal()) j["sigma"] = k.sigma();
    if (k.is_compact()) j["W"] = k.support();
    return j;
}

ordered_json physics_json(const PhysicsParams& p) {
    return {{"hbar", p.hbar}, {"mass", p.mass}, {"lambda", p.lambda}, {"sigma", p.sigma}};
}

ordered_json grid_json(const Grid1D& g) {
    return {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"n_points", g.size()}};
}

std::string format(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void add_check(ScenarioResult& r, std::string name, bool passed, std::string detail) {
    r.checks.push_back({std::move(name), passed, std::move(detail)});
}

void add_stat(ScenarioResult& r, std::string name, double value, std::string unit = "",
              std::optional<double> half_width = std::nullopt) {
    r.summary.push_back({std::move(name), value, half_width, std::move(unit)});
}

// Density restricted to the points where keep(x) holds, zero elsewhere.
template <typename Pred>
std::vector<double> masked(const Grid1D& grid, const std::vector<double>& density, Pred keep) {
    std::vector<double> out(density.size(), 0.0);
    for (std::size_t i = 0; i < density.size(); ++i)
        if (keep(grid.x(i))) out[i] = density[i];
    return out;
}

double integral(const Grid1D& grid, const std::vector<double>& density) {
    double s = 0.0;
    for (double v : density) s += v;
    return s * grid.dx();
}

ComplexVector add_packets(const Grid1D& grid, std::span<const double> centers, double width) {
    ComplexVector amps(grid.size(), Complex(0.0, 0.0));
    for (double c : centers) {
        const auto packet = WaveFunction1D::gaussian(grid, c, width);
        for (std::size_t i = 0; i < amps.size(); ++i) amps[i] += packet[i];
    }
    return amps;
}

}  // namespace

// ---------------------------------------------------------------------------

const Statistic& ScenarioResult::stat(const std::string& stat_name) const {
    for (const auto& s : summary)
        if (s.name == stat_name) return s;
    throw Error(ErrorCode::InvalidArgument, "no statistic named '" + stat_name + "'");
}

const Check& ScenarioResult::check(const std::string& check_name) const {
    for (const auto& c : checks)
        if (c.name == check_name) return c;
    throw Error(ErrorCode::InvalidArgument, "no check named '" + check_name + "'");
}

bool ScenarioResult::all_passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

double binomial_half_width(double p, std::size_t trials) noexcept {
    return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

void parallel_trials(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    if (n < 64 || workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

const std::vector<ScenarioInfo>& catalog() {
    static const std::vector<ScenarioInfo> list{
        {"measurement_chain", "pointer-state superposition a|'0'>|0> + b|'1'>|1> collapsed by hits; Born frequencies, "
                              "post-hit tail weight and N*lambda rate amplification"},
        {"marble_in_box", "two-branch marble with a small out-of-box branch; matter fraction, fuzzy-link verdict and "
                          "inside/outside structural isomorphism"},
        {"billiard_collision", "four-branch post-collision state with coefficients a^2, b^2, ab, ab; high/low density "
                               "sectors"},
        {"wallace_displacement", "Gaussian hit on a two-packet superposition drags the tail peak toward the collapse "
                                 "center"},
        {"hegerfeldt_regrowth", "compactly supported packet regrows tails under free evolution for any dt > 0"},
        {"kernel_dilemma", "Gaussian vs compact-support kernels: structured persistent tails vs unstructured regrown "
                           "tails"},
    };
    return list;
}

// ---------------------------------------------------------------------------
// measurement_chain

double post_hit_tail_weight(double selected_weight, double other_weight, double distance, const CollapseKernel& kernel) {
    const double f = kernel.amplitude(distance);
    const double other = other_weight * f * f;
    return other / (selected_weight + other);
}

ScenarioResult measurement_chain(const MeasurementChainParams& p) {
    const double wa = std::norm(p.a), wb = std::norm(p.b);
    if (std::abs(wa + wb - 1.0) > kNormTolerance)
        throw Error(ErrorCode::NotNormalized, "|a|^2 + |b|^2 must equal 1");
    if (p.n_pointer < 1) throw Error(ErrorCode::InvalidArgument, "n_pointer must be >= 1");
    if (p.n_trials < 1) throw Error(ErrorCode::InvalidArgument, "n_trials must be >= 1");
    if (p.kernel.is_ideal()) throw Error(ErrorCode::InvalidArgument, "measurement_chain needs a Gaussian or compact kernel");
    p.physics.validate();

    // Every pointer particle sits at 0 in branch '0' and at the separation in branch '1'.
    const BranchedState initial({{p.a, "0", std::vector<double>(p.n_pointer, 0.0)},
                                 {p.b, "1", std::vector<double>(p.n_pointer, p.separation)}},
                                p.branch_width);

    ScenarioResult r;
    r.name = "measurement_chain";
    r.parameters = {{"a", complex_json(p.a)},
                    {"b", complex_json(p.b)},
                    {"n_pointer", p.n_pointer},
                    {"separation", p.separation},
                    {"branch_width", p.branch_width},
                    {"kernel", kernel_json(p.kernel)},
                    {"physics", physics_json(p.physics)},
                    {"n_trials", p.n_trials},
                    {"seed", p.seed}};

    const RngStream master(p.seed);
    std::vector<BranchHit> hits(p.n_trials, BranchHit{initial, {}});
    std::vector<double> waits(p.n_trials);
    parallel_trials(p.n_trials, [&](std::size_t t) {
        RngStream rng = master.derive(t);
        const HitSample first = sample_hit_time(p.n_pointer, p.physics, rng);
        hits[t] = apply_branch_hit(initial, first.particle, p.kernel, rng);
        hits[t].event.time = first.wait;
        waits[t] = first.wait;
    });

    const double tail_closed_0 = post_hit_tail_weight(wa, wb, p.separation, p.kernel);
    const double tail_closed_1 = post_hit_tail_weight(wb, wa, p.separation, p.kernel);
    std::size_t count0 = 0;
    double wait_sum = 0.0, tail_sum = 0.0, max_tail_error = 0.0;
    r.trials.reserve(p.n_trials);
    for (std::size_t t = 0; t < p.n_trials; ++t) {
        const auto& ev = hits[t].event;
        const bool selected0 = ev.selected_branch == "0";
        const double tail = selected0 ? ev.post_weights[1] : ev.post_weights[0];
        const double closed = selected0 ? tail_closed_0 : tail_closed_1;
        count0 += selected0 ? 1 : 0;
        wait_sum += waits[t];
        tail_sum += tail;
        max_tail_error = std::max(max_tail_error, std::abs(tail - closed));
        r.trials.push_back({{"trial", static_cast<double>(t)},
                            {"first_hit_time", waits[t]},
                            {"selected_0", selected0 ? 1.0 : 0.0},
                            {"post_weight_0", ev.post_weights[0]},
                            {"post_weight_1", ev.post_weights[1]},
                            {"tail_weight", tail}});
        r.events.push_back(ev);
    }

    const auto n = static_cast<double>(p.n_trials);
    const double freq0 = static_cast<double>(count0) / n;
    const double born_hw = binomial_half_width(wa, p.n_trials);
    const double mean_wait = wait_sum / n;
    const double expected_wait = 1.0 / hit_rate(static_cast<double>(p.n_pointer), p.physics.lambda);
    const double wait_rel = std::abs(mean_wait - expected_wait) / expected_wait;

    add_stat(r, "selection_frequency_0", freq0, "", born_hw);
    add_stat(r, "born_weight_0", wa);
    add_stat(r, "mean_first_hit_time", mean_wait, "s");
    add_stat(r, "expected_first_hit_time", expected_wait, "s");
    add_stat(r, "first_hit_time_relative_error", wait_rel);
    add_stat(r, "hit_rate", hit_rate(static_cast<double>(p.n_pointer), p.physics.lambda), "1/s");
    add_stat(r, "mean_tail_weight", tail_sum / n);
    add_stat(r, "tail_weight_closed_form_selected_0", tail_closed_0);
    add_stat(r, "tail_weight_closed_form_selected_1", tail_closed_1);
    add_stat(r, "max_tail_weight_error", max_tail_error);
    add_stat(r, "suppression_factor", std::pow(p.kernel.amplitude(p.separation), 2));

    add_check(r, "born_frequency", std::abs(freq0 - wa) <= born_hw,
              "freq " + format(freq0) + " vs |a|^2 " + format(wa) + " +/- " + format(born_hw));
    add_check(r, "first_hit_time", wait_rel <= 0.05,
              "mean " + format(mean_wait) + " vs 1/(N lambda) " + format(expected_wait) + " (5%)");
    add_check(r, "tail_weight_closed_form", max_tail_error <= 1e-12,
              "max |tail - closed form| = " + format(max_tail_error));
    return r;
}

// ---------------------------------------------------------------------------
// marble_in_box

ScenarioResult marble_in_box(const MarbleParams& p) {
    if (!(p.inside_weight > 0.0 && p.inside_weight < 1.0))
        throw Error(ErrorCode::InvalidArgument, "inside_weight must lie in (0, 1)");
    if (!(p.box.hi > p.box.lo)) throw Error(ErrorCode::DegenerateRegion, "box must satisfy hi > lo");
    if (p.n_constituents < 1) throw Error(ErrorCode::InvalidArgument, "marble needs at least one constituent");
    const auto& grid = p.grid;

    // Branch centers are snapped to grid points so the two renderings are exact translates.
    auto snap = [&](double x) { return grid.x(grid.nearest_index(x)); };
    const double inside_center = snap(0.5 * (p.box.lo + p.box.hi));
    const double outside_center = snap(p.box.hi + 0.5 * p.box.width());
    std::vector<double> offsets(p.n_constituents), masses(p.n_constituents, 1.0 / static_cast<double>(p.n_constituents));
    for (std::size_t c = 0; c < p.n_constituents; ++c) {
        const double frac = p.n_constituents == 1 ? 0.0
                                                  : static_cast<double>(c) / static_cast<double>(p.n_constituents - 1) - 0.5;
        offsets[c] = std::round(frac * p.marble_size / grid.dx()) * grid.dx();
    }
    std::vector<double> in_pos(p.n_constituents), out_pos(p.n_constituents);
    for (std::size_t c = 0; c < p.n_constituents; ++c) {
        in_pos[c] = inside_center + offsets[c];
        out_pos[c] = outside_center + offsets[c];
    }
    const BranchedState state({{Complex(std::sqrt(p.inside_weight), 0.0), "inside", in_pos},
                               {Complex(std::sqrt(1.0 - p.inside_weight), 0.0), "outside", out_pos}},
                              p.branch_width);

    ScenarioResult r;
    r.name = "marble_in_box";
    r.parameters = {{"inside_weight", p.inside_weight},
                    {"box", {p.box.lo, p.box.hi}},
                    {"q", p.q},
                    {"marble_size", p.marble_size},
                    {"branch_width", p.branch_width},
                    {"n_constituents", p.n_constituents},
                    {"kernel", kernel_json(p.kernel)},
                    {"physics", physics_json(p.physics)},
                    {"grid", grid_json(grid)},
                    {"seed", p.seed}};

    const auto field = matter_density(state, masses, grid);
    const auto verdict = fuzzy_link(field, p.box, p.q);
    const double fraction_outside = 1.0 - verdict.fraction_inside;
    const auto inside_profile = branch_matter_profile(state, 0, masses, grid);
    const auto outside_profile = branch_matter_profile(state, 1, masses, grid);
    const double iso = isomorphism_score(inside_profile.values, outside_profile.values);

    // One GRW hit on the first constituent: Born-selects a branch and suppresses the other.
    RngStream rng(p.seed);
    auto [after, event] = apply_branch_hit(state, 0, p.kernel, rng);
    const auto field_after = matter_density(after, masses, grid);
    const auto verdict_after = fuzzy_link(field_after, p.box, p.q);
    r.events.push_back(event);

    add_stat(r, "total_mass", field.total_mass(), "kg");
    add_stat(r, "matter_fraction_inside", verdict.fraction_inside);
    add_stat(r, "matter_fraction_outside", fraction_outside);
    add_stat(r, "q", p.q);
    add_stat(r, "verdict_code", static_cast<double>(verdict.verdict));
    add_stat(r, "isomorphism_inside_outside", iso);
    add_stat(r, "post_hit_fraction_outside", 1.0 - verdict_after.fraction_inside);
    add_stat(r, "post_hit_verdict_code", static_cast<double>(verdict_after.verdict));
    r.parameters["verdict"] = std::string(to_string(verdict.verdict));
    r.parameters["post_hit_verdict"] = std::string(to_string(verdict_after.verdict));
    r.parameters["post_hit_selected_branch"] = *event.selected_branch;

    add_check(r, "matter_conserved", std::abs(field.total_mass() - 1.0) <= 1e-9,
              "integral of M = " + format(field.total_mass()));
    add_check(r, "fraction_outside_matches_weight", std::abs(fraction_outside - (1.0 - p.inside_weight)) <= 1e-9,
              "outside " + format(fraction_outside) + " vs |c2|^2 " + format(1.0 - p.inside_weight));
    add_check(r, "verdict_rule", verdict.verdict == classify_fraction(verdict.fraction_inside, p.q),
              std::string(to_string(verdict.verdict)));
    add_check(r, "structural_isomorphism", std::abs(iso - 1.0) <= 1e-9, "score " + format(iso));

    r.series.push_back({"matter_density",
                        {{"x", "m", grid.coordinates()},
                         {"matter_density", "kg/m", field.values},
                         {"matter_density_post_hit", "kg/m", field_after.values}}});
    return r;
}

// ---------------------------------------------------------------------------
// billiard_collision

ScenarioResult billiard_collision(const BilliardParams& p) {
    const double wa = std::norm(p.a), wb = std::norm(p.b);
    if (std::abs(wa + wb - 1.0) > kNormTolerance)
        throw Error(ErrorCode::NotNormalized, "|a|^2 + |b|^2 must equal 1");

    ScenarioResult r;
    r.name = "billiard_collision";
    r.parameters = {{"a", complex_json(p.a)},
                    {"b", complex_json(p.b)},
                    {"p_position", p.p_position},
                    {"q_position", p.q_position}};

    struct Sector {
        const char* label;
        Complex coefficient;
        double ball1, ball2;
    };
    // Ball positions after the collision, in the order of the four product terms.
    const Sector sectors[] = {{"a2:<-P_1|P->_2", p.a * p.a, p.p_position, p.p_position},
                              {"b2:<-Q_1|Q->_2", p.b * p.b, p.q_position, p.q_position},
                              {"ab:Q->_1|<-P_2", p.a * p.b, p.q_position, p.p_position},
                              {"ab:P->_1|<-Q_2", p.a * p.b, p.p_position, p.q_position}};
    std::vector<Branch> branches;
    double total = 0.0;
    for (const auto& s : sectors) {
        const double w = std::norm(s.coefficient);
        total += w;
        r.trials.push_back({{"weight", w}, {"coefficient_re", s.coefficient.real()}, {"coefficient_im", s.coefficient.imag()}});
        if (w > 0.0) branches.push_back({s.coefficient, s.label, {s.ball1, s.ball2}});
    }
    const BranchedState state(branches, 0.1);

    std::size_t high = 0;
    for (std::size_t k = 0; k < r.trials.size(); ++k) {
        const double w = r.trials[k]["weight"];
        const bool is_high = w > total - w;
        r.trials[k]["high_density"] = is_high ? 1.0 : 0.0;
        high += is_high ? 1 : 0;
        add_stat(r, std::string("sector_weight_") + std::to_string(k), w);
    }
    add_stat(r, "weight_sum", total);
    add_stat(r, "branch_count", static_cast<double>(state.size()));
    add_stat(r, "high_density_sectors", static_cast<double>(high));
    const bool dominance = wa >= 10.0 * wb;
    add_stat(r, "a_dominates_b", dominance ? 1.0 : 0.0);
    if (!dominance) r.warnings.push_back("|a|^2 >> |b|^2 does not hold; the high/low density reading assumes it");

    add_check(r, "weights_sum_to_one", std::abs(total - 1.0) <= 1e-12, "sum " + format(total));
    add_check(r, "global_phase_invariance", [&] {
        const Complex phase = std::polar(1.0, 0.7);
        const Complex a = p.a * phase, b = p.b * phase;
        const double w[] = {std::norm(a * a), std::norm(b * b), std::norm(a * b), std::norm(a * b)};
        for (std::size_t k = 0; k < 4; ++k)
            if (std::abs(w[k] - r.trials[k].at("weight")) > 1e-15) return false;
        return true;
    }(), "weights unchanged by a common phase on a and b");
    return r;
}

// ---------------------------------------------------------------------------
// wallace_displacement

ScenarioResult wallace_displacement(const WallaceParams& p) {
    if (p.collapse_center == p.tail_center) throw Error(ErrorCode::InvalidArgument, "x and y must differ");
    if (!(p.tail_width > 0.0) || !(p.sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "widths must be > 0");
    const auto& grid = p.grid;
    const auto kernel = CollapseKernel::gaussian(p.sigma);

    const auto center_packet = WaveFunction1D::gaussian(grid, p.collapse_center, p.tail_width);
    const auto tail_packet = WaveFunction1D::gaussian(grid, p.tail_center, p.tail_width);
    const double centers[] = {p.collapse_center, p.tail_center};
    const auto superposition = normalize(WaveFunction1D(grid, add_packets(grid, centers, p.tail_width)));
    const auto post = apply_hit(superposition, p.collapse_center, kernel);

    const double analytic = displaced_tail_center(p.tail_center, p.collapse_center, p.tail_width, p.sigma);
    const double numeric = numeric_tail_peak(tail_packet, p.collapse_center, kernel);
    const double diff = numeric - analytic;
    if (std::abs(diff) > 2.0 * grid.dx())
        throw Error(ErrorCode::GridTooCoarse, "numeric tail peak " + format(numeric) + " misses analytic " +
                                                  format(analytic) + " by more than two cells");

    // Post-hit lobes by linearity: the kernel acting on each packet separately.
    std::vector<double> tail_lobe(grid.size()), center_lobe(grid.size());
    double lobe_sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double k = kernel.amplitude(grid.displacement(grid.x(i), p.collapse_center));
        tail_lobe[i] = std::norm(tail_packet[i] * k);
        center_lobe[i] = std::norm(center_packet[i] * k);
        lobe_sum += tail_lobe[i] + center_lobe[i];
    }

    ScenarioResult r;
    r.name = "wallace_displacement";
    r.parameters = {{"x", p.collapse_center},
                    {"y", p.tail_center},
                    {"s", p.tail_width},
                    {"sigma", p.sigma},
                    {"grid", grid_json(grid)}};
    const double displacement = analytic - p.tail_center;
    const double numeric_displacement = numeric - p.tail_center;
    add_stat(r, "analytic_tail_center", analytic, "m");
    add_stat(r, "numeric_tail_peak", numeric, "m");
    add_stat(r, "difference", diff, "m");
    add_stat(r, "grid_spacing", grid.dx(), "m");
    add_stat(r, "analytic_displacement", displacement, "m");
    add_stat(r, "numeric_displacement", numeric_displacement, "m");
    add_stat(r, "tail_lobe_weight", integral(grid, tail_lobe) / (lobe_sum * grid.dx()));
    add_stat(r, "post_hit_norm", post.norm_squared());

    const double toward = p.collapse_center - p.tail_center;
    add_check(r, "numeric_within_one_cell", std::abs(diff) <= grid.dx(),
              "|numeric - u*| = " + format(std::abs(diff)) + ", dx = " + format(grid.dx()));
    add_check(r, "displacement_toward_center",
              displacement == 0.0 || (displacement > 0.0) == (toward > 0.0),
              "u* - y = " + format(displacement));

    r.series.push_back({"wallace_profiles",
                        {{"x", "m", grid.coordinates()},
                         {"density_pre", "1/m", mod_square_density(superposition)},
                         {"density_post", "1/m", mod_square_density(post)},
                         {"tail_lobe_unnormalized", "1/m", tail_lobe}}});
    return r;
}

// ---------------------------------------------------------------------------
// hegerfeldt_regrowth

ScenarioResult hegerfeldt_regrowth(const HegerfeldtParams& p) {
    if (!(p.window > 0.0)) throw Error(ErrorCode::InvalidArgument, "window W must be > 0");
    if (p.dt_list.empty()) throw Error(ErrorCode::InvalidArgument, "dt_list must not be empty");
    for (double dt : p.dt_list)
        if (!(dt >= 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt values must be >= 0");
    p.physics.validate();
    const auto& grid = p.grid;

    const auto packet = WaveFunction1D::gaussian(grid, 0.0, p.packet_width);
    ComplexVector amps(packet.amplitudes().begin(), packet.amplitudes().end());
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (std::abs(grid.displacement(grid.x(i), 0.0)) > p.window) amps[i] = 0.0;
    const auto truncated = normalize(WaveFunction1D(grid, std::move(amps)));
    const Interval window{-p.window, p.window};

    ScenarioResult r;
    r.name = "hegerfeldt_regrowth";
    r.parameters = {{"W", p.window},
                    {"packet_width", p.packet_width},
                    {"dt_list", p.dt_list},
                    {"physics", physics_json(p.physics)},
                    {"grid", grid_json(grid)}};

    std::vector<double> dts = p.dt_list;
    std::sort(dts.begin(), dts.end());
    dts.erase(std::unique(dts.begin(), dts.end()), dts.end());
    EvolveOptions options;
    options.boundary = BoundaryPolicy::Throw;
    std::vector<double> masses(dts.size());
    parallel_trials(dts.size(), [&](std::size_t k) {
        masses[k] = tail_mass(evolve_free(truncated, p.physics, dts[k], options), window);
    });
    for (std::size_t k = 0; k < dts.size(); ++k) r.trials.push_back({{"dt", dts[k]}, {"tail_mass", masses[k]}});

    std::optional<std::size_t> first_positive;
    for (std::size_t k = 0; k < dts.size(); ++k)
        if (dts[k] > 0.0) {
            first_positive = k;
            break;
        }
    const std::size_t n_mono = std::min<std::size_t>(5, dts.size());
    bool monotone = true;
    for (std::size_t k = 1; k < n_mono; ++k) monotone = monotone && masses[k] > masses[k - 1];

    add_stat(r, "tail_mass_initial", tail_mass(truncated, window));
    if (first_positive) {
        add_stat(r, "smallest_positive_dt", dts[*first_positive], "s");
        add_stat(r, "tail_mass_at_smallest_dt", masses[*first_positive]);
    }
    add_stat(r, "tail_mass_at_largest_dt", masses.back());

    if (dts.front() == 0.0)
        add_check(r, "zero_at_dt0", masses.front() == 0.0, "tail mass at dt=0 is " + format(masses.front()));
    if (first_positive)
        add_check(r, "positive_at_smallest_dt", masses[*first_positive] > 1e-10,
                  "tail mass " + format(masses[*first_positive]) + " at dt " + format(dts[*first_positive]));
    add_check(r, "monotone_first_samples", monotone, "strictly increasing over first " + std::to_string(n_mono) + " dt");

    r.series.push_back({"hegerfeldt_tail_mass", {{"dt", "s", dts}, {"tail_mass", "1", masses}}});
    return r;
}

// ---------------------------------------------------------------------------
// kernel_dilemma

ScenarioResult kernel_dilemma(const DilemmaParams& p) {
    if (!p.gaussian.is_gaussian()) throw Error(ErrorCode::InvalidArgument, "kernel_a must be Gaussian");
    if (!p.compact.is_compact()) throw Error(ErrorCode::InvalidArgument, "kernel_b must be compact support");
    if (!(p.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
    const auto& grid = p.grid;
    const Complex half(std::sqrt(0.5), 0.0);

    ScenarioResult r;
    r.name = "kernel_dilemma";
    r.parameters = {{"kernel_a", kernel_json(p.gaussian)},
                    {"kernel_b", kernel_json(p.compact)},
                    {"separation", p.separation},
                    {"branch_width", p.branch_width},
                    {"packet_width", p.packet_width},
                    {"dt", p.dt},
                    {"physics", physics_json(p.physics)},
                    {"grid", grid_json(grid)},
                    {"n_trials", p.n_trials},
                    {"seed", p.seed}};

    // Branch-level chain under each kernel.
    auto chain = [&](const CollapseKernel& kernel) {
        MeasurementChainParams mc;
        mc.a = half;
        mc.b = half;
        mc.separation = p.separation;
        mc.branch_width = p.branch_width;
        mc.kernel = kernel;
        mc.physics = p.physics;
        mc.n_trials = p.n_trials;
        mc.seed = p.seed;
        return measurement_chain(mc);
    };
    const auto chain_g = chain(p.gaussian);
    const auto chain_c = chain(p.compact);

    // Grid-level lobes: two packets, hit centered on the Born-selected one.
    const double centers[] = {0.0, p.separation};
    const auto psi = normalize(WaveFunction1D(grid, add_packets(grid, centers, p.packet_width)));
    RngStream rng(p.seed);
    const std::size_t selected = rng.uniform() < 0.5 ? 0 : 1;
    const double z = centers[selected];
    const double other = centers[1 - selected];
    auto near_center = [&](double x) { return std::abs(grid.displacement(x, z)) < std::abs(grid.displacement(x, other)); };
    auto near_tail = [&](double x) { return !near_center(x); };

    const auto post_g = apply_hit(psi, z, p.gaussian);
    const auto rho_g = mod_square_density(post_g);
    const auto center_g = masked(grid, rho_g, near_center);
    const auto tail_g = masked(grid, rho_g, near_tail);
    const double tail_weight_g = integral(grid, tail_g);
    const double iso_g = isomorphism_score(center_g, tail_g);

    const auto post_c = apply_hit(psi, z, p.compact);
    const Interval window{z - p.compact.support(), z + p.compact.support()};
    const double tail_weight_c = tail_mass(post_c, window);
    EvolveOptions options;
    options.boundary = BoundaryPolicy::Throw;
    const auto regrown = evolve_free(post_c, p.physics, p.dt, options);
    const auto rho_c = mod_square_density(regrown);
    auto in_window = [&](double x) { return std::abs(grid.displacement(x, z)) <= p.compact.support(); };
    const auto center_c = masked(grid, rho_c, in_window);
    const auto tail_c = masked(grid, rho_c, near_tail);
    const auto outside_c = masked(grid, rho_c, [&](double x) { return !in_window(x); });
    const double regrown_mass = tail_mass(regrown, window);
    const double regrown_tail_region = integral(grid, tail_c);
    const double iso_c = regrown_tail_region > 0.0 ? isomorphism_score(center_c, tail_c) : 0.0;
    const double iso_c_outside = regrown_mass > 0.0 ? isomorphism_score(center_c, outside_c) : 0.0;

    add_stat(r, "gaussian_tail_weight", chain_g.stat("mean_tail_weight").value);
    add_stat(r, "gaussian_tail_weight_closed_form", chain_g.stat("tail_weight_closed_form_selected_0").value);
    add_stat(r, "gaussian_grid_tail_weight", tail_weight_g);
    add_stat(r, "gaussian_isomorphism", iso_g);
    add_stat(r, "compact_tail_weight", chain_c.stat("mean_tail_weight").value);
    add_stat(r, "compact_grid_tail_weight", tail_weight_c);
    add_stat(r, "compact_regrown_mass", regrown_mass);
    add_stat(r, "compact_regrown_tail_region_mass", regrown_tail_region);
    add_stat(r, "compact_regrown_isomorphism", iso_c);
    add_stat(r, "compact_regrown_outside_isomorphism", iso_c_outside);
    add_stat(r, "selected_center", z, "m");

    add_check(r, "gaussian_tail_persists", chain_g.stat("mean_tail_weight").value > 0.0 && tail_weight_g > 0.0,
              "branch " + format(chain_g.stat("mean_tail_weight").value) + ", grid " + format(tail_weight_g));
    add_check(r, "gaussian_tail_isomorphic", iso_g > 0.99, "score " + format(iso_g));
    add_check(r, "compact_tail_zero", chain_c.stat("mean_tail_weight").value == 0.0 && tail_weight_c == 0.0,
              "branch " + format(chain_c.stat("mean_tail_weight").value) + ", grid " + format(tail_weight_c));
    add_check(r, "compact_tail_regrows", regrown_mass > 0.0, "mass outside window " + format(regrown_mass));
    add_check(r, "compact_regrown_less_structured", iso_c < iso_g,
              "compact " + format(iso_c) + " < gaussian " + format(iso_g));

    r.series.push_back({"dilemma_profiles",
                        {{"x", "m", grid.coordinates()},
                         {"gaussian_post_hit", "1/m", rho_g},
                         {"compact_post_hit", "1/m", mod_square_density(post_c)},
                         {"compact_regrown", "1/m", rho_c}}});
    return r;
}

}  // namespace grw::scenarios
