#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "grwlab/scenarios.hpp"

namespace grw::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class UnitMode { Scaled, SI };

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
    std::optional<UnitMode> units;
};

// Fully resolved run description. Lengths default to multiples of sigma and times to multiples
// of m sigma^2 / hbar, so the same config shape works in scaled and SI units.
struct RunConfig {
    std::string scenario;
    UnitMode units = UnitMode::Scaled;
    PhysicsParams physics = PhysicsParams::scaled();
    std::string kernel = "gaussian";
    double window = 1.0;  // compact-support half-width W
    std::optional<Grid1D> grid;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "grwlab-out";

    // Canonical JSON form embedded in every output file.
    nlohmann::ordered_json to_json() const;
};

// Validates the document and applies overrides. Throws Error(ConfigInvalid) naming the field.
RunConfig parse_config(const nlohmann::json& document, const Overrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

scenarios::ScenarioResult execute(const RunConfig& config);

// Writes summary.<scenario>.json and series.<name>.csv; returns the written paths.
std::vector<std::filesystem::path> write_outputs(const RunConfig& config, const scenarios::ScenarioResult& result);

nlohmann::ordered_json summary_json(const RunConfig& config, const scenarios::ScenarioResult& result);
std::string series_csv(const RunConfig& config, const scenarios::Series& series);
std::string digest(const scenarios::ScenarioResult& result);

std::string list_scenarios();

// Exit codes: 0 success, 1 validation error, 2 runtime error.
int run(const std::filesystem::path& config_path, const Overrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace grw::cli
