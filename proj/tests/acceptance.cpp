// Acceptance suite: one PASS/FAIL line per criterion; exit status is the number of failures.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "grwlab/cli.hpp"
#include "grwlab/collapse.hpp"
#include "grwlab/ontology.hpp"
#include "grwlab/propagator.hpp"
#include "grwlab/scenarios.hpp"

using namespace grw;
namespace sc = grw::scenarios;

namespace {

struct Clause {
    std::string name;
    bool passed;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const PhysicsParams kUnits = PhysicsParams::scaled();

WaveFunction1D two_packets(const Grid1D& grid, double x1, double x2, double width) {
    const auto p1 = WaveFunction1D::gaussian(grid, x1, width);
    const auto p2 = WaveFunction1D::gaussian(grid, x2, width);
    ComplexVector amps(grid.size());
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = p1[i] + p2[i];
    return normalize(WaveFunction1D(grid, std::move(amps)));
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---------------------------------------------------------------------------

std::vector<Clause> rate_amplification() {
    const double rate = hit_rate(1e23, 1e-16);
    const double ulp = std::nextafter(1e7, 2e7) - 1e7;
    sc::MeasurementChainParams p;
    p.n_pointer = 1000;
    p.physics.lambda = 1e-3;
    p.n_trials = 10000;
    const auto r = sc::measurement_chain(p);
    const double rel = r.stat("first_hit_time_relative_error").value;
    char raw[64];
    std::snprintf(raw, sizeof raw, "%.17g", rate);
    return {{"N lambda = 1e7 /s", std::abs(rate - 1e7) <= 2 * ulp, std::string("hit_rate = ") + raw},
            {"mean first hit within 5% of 1/(N lambda)", rel <= 0.05,
             "mean " + fmt(r.stat("mean_first_hit_time").value) + " vs " + fmt(r.stat("expected_first_hit_time").value)}};
}

std::vector<Clause> born_statistics() {
    const auto r = sc::measurement_chain({});
    const double f = r.stat("selection_frequency_0").value;
    return {{"|a|^2 = 0.7 selected at 0.7 +/- 0.014", std::abs(f - 0.7) <= 0.014, "frequency " + fmt(f)}};
}

std::vector<Clause> eq5_structure() {
    const auto gauss = CollapseKernel::gaussian(1.0);
    const double e8 = std::exp(-8.0), closed = e8 / (1.0 + e8);
    const BranchedState state({{std::sqrt(0.5), "0", {0.0}}, {std::sqrt(0.5), "1", {4.0}}}, 0.05);
    const double branch = apply_branch_hit_at(state, 0, 0, gauss).event.post_weights[1];

    const Grid1D grid(-8.0, 12.0, 8192);
    const auto hit = apply_hit(two_packets(grid, 0.0, 4.0, 0.02), 0.0, gauss);
    const double oracle = tail_mass(hit, Interval{-2.0, 2.0});
    return {{"point-branch |d|^2 within 1e-12 of e^-8/(1+e^-8)", std::abs(branch - closed) <= 1e-12,
             "|d|^2 = " + fmt(branch) + ", closed " + fmt(closed)},
            {"within 1% of the grid oracle", std::abs(branch - oracle) <= 0.01 * oracle, "grid " + fmt(oracle)}};
}

std::vector<Clause> bare_tails() {
    RngStream rng(4242);
    const auto gauss = CollapseKernel::gaussian(1.0);
    std::size_t violations = 0;
    double smallest = 1.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(6);
        std::vector<Branch> branches;
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const Complex w = std::polar(0.01 + rng.uniform(), 2 * std::numbers::pi * rng.uniform());
            total += std::norm(w);
            branches.push_back({w, std::to_string(k), {12.0 * rng.uniform()}});
        }
        for (auto& b : branches) b.weight /= std::sqrt(total);
        const auto hit = apply_branch_hit(BranchedState(branches, 0.05), 0, gauss, rng);
        for (double w : hit.event.post_weights) {
            violations += !(w > 0.0);
            smallest = std::min(smallest, w);
        }
    }
    return {{"all post-hit weights > 0 over 1000 random states", violations == 0,
             "violations " + std::to_string(violations) + ", smallest " + fmt(smallest)}};
}

std::vector<Clause> structural_symmetry() {
    RngStream rng(55);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> a(512), b;
        for (auto& v : a) v = rng.uniform();
        const double scale = std::pow(10.0, -8.0 + 16.0 * rng.uniform());
        for (double v : a) b.push_back(v * scale);
        worst = std::max({worst, std::abs(isomorphism_score(a, b) - 1.0), std::abs(isomorphism_score(b, a) - 1.0)});
    }
    sc::DilemmaParams p;
    p.n_trials = 200;
    const double fresh = sc::kernel_dilemma(p).stat("gaussian_isomorphism").value;
    return {{"scale invariance within 1e-9", worst <= 1e-9, "max |score - 1| = " + fmt(worst)},
            {"fresh tail vs center lobe > 0.99", fresh > 0.99, "score " + fmt(fresh)}};
}

std::vector<Clause> wallace() {
    std::vector<Clause> out;
    for (double s : {1.0, 0.5}) {
        sc::WallaceParams p;
        p.tail_width = s;
        const auto r = sc::wallace_displacement(p);
        const double diff = std::abs(r.stat("numeric_tail_peak").value - r.stat("analytic_tail_center").value);
        out.push_back({"s = " + fmt(s) + " sigma, y = 10 sigma: argmax within one cell of u*", diff <= p.grid.dx(),
                       "numeric " + fmt(r.stat("numeric_tail_peak").value) + ", u* " +
                           fmt(r.stat("analytic_tail_center").value)});
    }
    RngStream rng(6);
    std::size_t wrong = 0;
    for (int i = 0; i < 100000; ++i) {
        const double y = 40 * rng.uniform() - 20, x = 40 * rng.uniform() - 20;
        const double s = 1e-3 + 5 * rng.uniform(), sigma = 1e-3 + 5 * rng.uniform();
        if (x != y) wrong += (peak_displacement(y, x, s, sigma) > 0) != (x > y);
    }
    out.push_back({"displacement always toward the collapse center", wrong == 0, std::to_string(wrong) + " wrong signs"});
    return out;
}

std::vector<Clause> hegerfeldt() {
    const auto r = sc::hegerfeldt_regrowth({});
    std::vector<Clause> out;
    for (const char* name : {"zero_at_dt0", "positive_at_smallest_dt", "monotone_first_samples"}) {
        const auto& c = r.check(name);
        out.push_back({name, c.passed, c.detail});
    }
    return out;
}

std::vector<Clause> energy_ledger() {
    // Broad packet (s = 10 sigma) with sigma = hbar = m = 1.
    const Grid1D grid(-100.0, 100.0, 4096);
    const auto psi = WaveFunction1D::gaussian(grid, 0.0, 10.0);
    RngStream rng(8);
    const auto gain = energy_gain_per_hit(psi, CollapseKernel::gaussian(1.0), kUnits, rng, 1000);
    const double target = kUnits.hbar * kUnits.hbar / (4 * kUnits.mass * kUnits.sigma * kUnits.sigma);

    auto ideal_gain = [](std::size_t n) {
        const Grid1D g(-40.0, 40.0, n);
        RngStream r(12);
        return energy_gain_per_hit(WaveFunction1D::gaussian(g, 0.0, 5.0), CollapseKernel::ideal(), kUnits, r, 200).mean;
    };
    const double coarse = ideal_gain(1024), fine = ideal_gain(2048);
    return {{"Gaussian mean dE = hbar^2/(4 m sigma^2) within 5%", std::abs(gain.mean - target) <= 0.05 * target,
             "mean " + fmt(gain.mean) + " +/- " + fmt(gain.standard_error) + " vs " + fmt(target)},
            {"Ideal-kernel dE grows when dx is halved", fine > coarse, fmt(coarse) + " -> " + fmt(fine)}};
}

std::vector<Clause> dilemma() {
    const auto r = sc::kernel_dilemma({});
    const double gw = r.stat("gaussian_tail_weight").value, gi = r.stat("gaussian_isomorphism").value;
    const double cw = r.stat("compact_grid_tail_weight").value, cb = r.stat("compact_tail_weight").value;
    const double ci = r.stat("compact_regrown_isomorphism").value;
    return {{"Gaussian tail weight > 0, isomorphism > 0.99", gw > 0.0 && gi > 0.99,
             "weight " + fmt(gw) + ", score " + fmt(gi)},
            {"CompactSupport post-hit tail weight = 0", cw == 0.0 && cb == 0.0,
             "grid " + fmt(cw) + ", branch " + fmt(cb)},
            {"regrown compact tail scores below the Gaussian tail", ci < gi, fmt(ci) + " < " + fmt(gi)}};
}

std::vector<Clause> numerics_hygiene() {
    std::vector<Clause> out;
    {
        const Grid1D grid(-16.0, 16.0, 1024);
        const auto V = Potential1D::harmonic(grid, 1.0, 1.3, 0.5);
        const auto psi = WaveFunction1D::gaussian(grid, -1.0, 0.5, 2.0);
        const double drift = std::abs(evolve(psi, V, kUnits, 1e-3, 1000).norm_squared() - psi.norm_squared());
        out.push_back({"norm drift < 1e-9 per 1e3 steps", drift < 1e-9, "drift " + fmt(drift)});
    }
    {
        const Grid1D grid(-60.0, 60.0, 4096);
        const double s = 0.8;
        const auto g = WaveFunction1D::gaussian(grid, 0.0, s);
        double worst = 0.0;
        for (double t : {0.5, 2.0, 6.0}) {
            const double analytic = s * std::sqrt(1.0 + std::pow(t / (2 * s * s), 2));
            const auto rho = mod_square_density(evolve_free(g, kUnits, t));
            const double measured = std::sqrt(position_moments(grid, rho).variance);
            worst = std::max(worst, std::abs(measured - analytic) / analytic);
        }
        out.push_back({"free width matches s(t) within 0.1%", worst < 1e-3, "max relative error " + fmt(worst)});
    }
    {
        const Grid1D grid(-16.0, 16.0, 512);
        const auto V = Potential1D::harmonic(grid, 1.0, 1.0);
        const auto psi = WaveFunction1D::gaussian(grid, 2.0, 0.6, 1.0);
        const std::size_t n = 50;
        const auto ref = evolve(psi, V, kUnits, 1.0 / (16 * n), 16 * n);
        const double e1 = max_abs_diff(evolve(psi, V, kUnits, 1.0 / n, n).amplitudes(), ref.amplitudes());
        const double e2 = max_abs_diff(evolve(psi, V, kUnits, 1.0 / (2 * n), 2 * n).amplitudes(), ref.amplitudes());
        const double ratio = e1 / e2;
        out.push_back({"second-order convergence ratio in [3.5, 4.5]", ratio >= 3.5 && ratio <= 4.5, "ratio " + fmt(ratio)});
    }
    {
        namespace fs = std::filesystem;
        const auto dir = fs::temp_directory_path() / "grwlab-acceptance";
        bool identical = true;
        std::size_t files = 0;
        for (const char* name : {"measurement_chain", "marble_in_box", "billiard_collision", "wallace_displacement",
                                 "hegerfeldt_regrowth", "kernel_dilemma"}) {
            fs::remove_all(dir);
            nlohmann::json doc{{"scenario", name}, {"seed", 2024}, {"output_dir", dir.string()}};
            const auto config = cli::parse_config(doc);
            std::vector<std::string> first;
            for (const auto& p : cli::write_outputs(config, cli::execute(config))) first.push_back(slurp(p));
            const auto paths = cli::write_outputs(config, cli::execute(config));
            for (std::size_t i = 0; i < paths.size(); ++i, ++files) identical &= slurp(paths[i]) == first.at(i);
        }
        fs::remove_all(dir);
        out.push_back({"identical seeds give byte-identical outputs", identical,
                       std::to_string(files) + " files compared across 6 scenarios"});
    }
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<std::vector<Clause>()>>> criteria{
        {"rate amplification", rate_amplification},
        {"Born statistics", born_statistics},
        {"post-hit weight structure", eq5_structure},
        {"bare tails persist", bare_tails},
        {"structural symmetry", structural_symmetry},
        {"Wallace displacement", wallace},
        {"Hegerfeldt regrowth", hegerfeldt},
        {"energy ledger", energy_ledger},
        {"dilemma table", dilemma},
        {"numerics hygiene", numerics_hygiene},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::vector<Clause> clauses;
        try {
            clauses = criteria[i].second();
        } catch (const std::exception& e) {
            clauses = {{"threw", false, e.what()}};
        }
        const bool ok = std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.passed; });
        failures += !ok;
        std::printf("%s %2zu %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str());
        for (const auto& c : clauses)
            std::printf("       %s %s: %s\n", c.passed ? "ok  " : "FAIL", c.name.c_str(), c.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
