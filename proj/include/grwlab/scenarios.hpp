#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grwlab/collapse.hpp"
#include "grwlab/ontology.hpp"
#include "grwlab/state.hpp"

namespace grw::scenarios {

struct Statistic {
    std::string name;
    double value = 0.0;
    std::optional<double> half_width;  // confidence half-width used by the matching check
    std::string unit;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Column {
    std::string name;
    std::string unit;
    std::vector<double> values;
};

// Plot-ready table; the first column is the coordinate.
struct Series {
    std::string name;
    std::vector<Column> columns;
};

using TrialRecord = std::map<std::string, double>;

struct ScenarioResult {
    std::string name;
    nlohmann::ordered_json parameters;
    std::vector<TrialRecord> trials;
    std::vector<Statistic> summary;
    std::vector<Check> checks;
    std::vector<CollapseEvent> events;
    std::vector<Series> series;
    std::vector<std::string> warnings;

    const Statistic& stat(const std::string& name) const;
    const Check& check(const std::string& name) const;
    bool all_passed() const noexcept;
};

// 3 * sqrt(p (1 - p) / T)
double binomial_half_width(double p, std::size_t trials) noexcept;

// Runs fn(i) for i in [0, n) on a thread pool; fn must only write to slot i of its own output.
void parallel_trials(std::size_t n, const std::function<void(std::size_t)>& fn);

struct ScenarioInfo {
    std::string name;
    std::string description;
};
const std::vector<ScenarioInfo>& catalog();

// ---------------------------------------------------------------------------

struct MeasurementChainParams {
    Complex a{std::sqrt(0.7), 0.0};
    Complex b{std::sqrt(0.3), 0.0};
    std::size_t n_pointer = 1;
    double separation = 4.0;  // pointer displacement between outcomes
    double branch_width = 0.05;
    CollapseKernel kernel = CollapseKernel::gaussian(1.0);
    PhysicsParams physics = PhysicsParams::scaled();
    std::size_t n_trials = 10000;
    std::uint64_t seed = 1;
};
ScenarioResult measurement_chain(const MeasurementChainParams& p);

// Closed-form weight left on the unselected branch after one hit centered on the selected one.
double post_hit_tail_weight(double selected_weight, double other_weight, double distance, const CollapseKernel& kernel);

struct MarbleParams {
    double inside_weight = 0.95;
    Interval box{-5.0, 5.0};
    double q = kDefaultFuzzyQ;
    double marble_size = 1.0;  // spread of the constituent particles
    double branch_width = 0.2;
    std::size_t n_constituents = 3;
    CollapseKernel kernel = CollapseKernel::gaussian(1.0);
    PhysicsParams physics = PhysicsParams::scaled();
    Grid1D grid{-20.0, 20.0, 4096};
    std::uint64_t seed = 1;
};
ScenarioResult marble_in_box(const MarbleParams& p);

struct BilliardParams {
    Complex a{std::sqrt(0.9), 0.0};
    Complex b{std::sqrt(0.1), 0.0};
    double p_position = -1.0;
    double q_position = 1.0;
};
ScenarioResult billiard_collision(const BilliardParams& p);

struct WallaceParams {
    double collapse_center = 0.0;  // x
    double tail_center = 10.0;  // y
    double tail_width = 1.0;  // s
    double sigma = 1.0;
    Grid1D grid{-40.0, 40.0, 8192};
};
ScenarioResult wallace_displacement(const WallaceParams& p);

struct HegerfeldtParams {
    double window = 1.0;  // W
    double packet_width = 1.0;
    std::vector<double> dt_list{0.0, 1e-6, 2e-6, 4e-6, 8e-6, 1.6e-5, 3.2e-5, 6.4e-5};
    PhysicsParams physics = PhysicsParams::scaled();
    Grid1D grid{-20.0, 20.0, 4096};
};
ScenarioResult hegerfeldt_regrowth(const HegerfeldtParams& p);

struct DilemmaParams {
    CollapseKernel gaussian = CollapseKernel::gaussian(1.0);
    CollapseKernel compact = CollapseKernel::compact_support(1.0, 1.0);
    double separation = 4.0;
    double branch_width = 0.05;  // point-branch metadata for the measurement chain
    double packet_width = 0.5;  // grid packet width for the lobe comparison
    double dt = 1e-3;
    PhysicsParams physics = PhysicsParams::scaled();
    Grid1D grid{-20.0, 20.0, 4096};
    std::size_t n_trials = 2000;
    std::uint64_t seed = 1;
};
ScenarioResult kernel_dilemma(const DilemmaParams& p);

}  // namespace grw::scenarios
