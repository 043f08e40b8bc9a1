#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "grwlab/cli.hpp"
#include "grwlab/error.hpp"
#include "support.hpp"

using namespace grw;
using grw::testing::throws_code;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("grwlab-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const auto path = dir / "config.json";
    std::ofstream(path) << text;
    return path;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run_cli(const fs::path& config, const cli::Overrides& o = {}) {
    std::ostringstream out, err;
    const int code = cli::run(config, o, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("valid measurement_chain run") {
    const auto dir = scratch("valid");
    const auto cfg = write_config(dir, R"({
        // comment lines are allowed
        "scenario": "measurement_chain",
        "seed": 3,
        "output_dir": ")" + (dir / "out").string() + R"(",
        "params": {"n_trials": 2000}
    })");
    const auto r = run_cli(cfg);
    INFO(r.err);
    REQUIRE(r.code == 0);
    const auto summary_path = dir / "out" / "summary.measurement_chain.json";
    REQUIRE(fs::exists(summary_path));
    const auto summary = json::parse(slurp(summary_path));
    CHECK(summary["summary"].contains("selection_frequency_0"));
    CHECK(summary["summary"]["selection_frequency_0"].contains("half_width"));
    CHECK(summary["version"] == cli::kVersion);
    CHECK(summary["config"]["seed"] == 3);
    CHECK(summary["config"]["params"]["n_trials"] == 2000);
    CHECK(r.out.find("selection_frequency_0") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "series.events.csv"));
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const auto dir = scratch("determinism");
    for (const char* scenario : {"measurement_chain", "kernel_dilemma", "hegerfeldt_regrowth"}) {
        const std::string name = scenario;
        const auto cfg = write_config(dir, R"({"scenario": ")" + name + R"(", "seed": 11, "output_dir": ")" +
                                               (dir / "out").string() + R"(", "params": {}})");
        REQUIRE(run_cli(cfg).code == 0);
        std::map<std::string, std::string> first;
        for (const auto& e : fs::directory_iterator(dir / "out")) first[e.path().filename()] = slurp(e.path());
        fs::remove_all(dir / "out");
        REQUIRE(run_cli(cfg).code == 0);
        for (const auto& [file, bytes] : first) {
            INFO(name << " " << file);
            CHECK(slurp(dir / "out" / file) == bytes);
        }
        fs::remove_all(dir / "out");
    }
}

TEST_CASE("validation errors exit 1 with field-level messages") {
    const auto dir = scratch("invalid");
    auto expect = [&](const std::string& text, const std::string& fragment) {
        const auto r = run_cli(write_config(dir, text));
        INFO(text);
        INFO(r.err);
        CHECK(r.code == 1);
        CHECK(r.err.find(fragment) != std::string::npos);
    };
    expect(R"({"scenario": "marble_in_box", "params": {"q": 0.7}})", "(0, 0.5)");
    expect(R"({"scenario": "marble_in_box", "params": {"q": 0.7}})", "q");
    expect(R"({"scenario": "measurement_chain", "colour": 1})", "colour");
    expect(R"({"scenario": "measurement_chain", "params": {"sepration": 4}})", "sepration");
    expect(R"({"scenario": "no_such_thing"})", "no_such_thing");
    expect(R"({"scenario": "measurement_chain", "params": {"a": [1.0, 0.0]}})", "");
    expect(R"({"scenario": "wallace_displacement", "params": {"s": -1}})", "s");
    expect(R"({"scenario": "measurement_chain", "physics": {"sigma": 0}})", "sigma");
    expect(R"({"scenario": "measurement_chain", "physics": {"kernel": "boxcar"}})", "kernel");
    expect(R"({"scenario": "hegerfeldt_regrowth", "grid": {"x_min": 1, "x_max": 0, "n_points": 64}})", "grid");
    expect("{ not json", "");
}

TEST_CASE("runtime errors exit 2") {
    const auto dir = scratch("runtime");
    CHECK(run_cli(dir / "missing.json").code == 2);

    // A tiny box makes the regrowing packet reach the edges.
    const auto cfg = write_config(dir, R"({"scenario": "hegerfeldt_regrowth",
        "grid": {"x_min": -3, "x_max": 3, "n_points": 512}, "params": {"dt_list": [0, 50]},
        "output_dir": ")" + (dir / "out").string() + R"("})");
    const auto r = run_cli(cfg);
    CHECK(r.code == 2);
    CHECK(r.err.find("BoundaryContamination") != std::string::npos);
}

TEST_CASE("overrides") {
    const json doc{{"scenario", "measurement_chain"}, {"seed", 5}};
    CHECK(cli::parse_config(doc).seed == 5);

    cli::Overrides o;
    o.seed = 99;
    o.output_dir = "elsewhere";
    o.units = cli::UnitMode::SI;
    const auto c = cli::parse_config(doc, o);
    CHECK(c.seed == 99);
    CHECK(c.output_dir == fs::path("elsewhere"));
    CHECK(c.units == cli::UnitMode::SI);
    CHECK(c.physics.sigma == 1e-5);
    CHECK(c.physics.lambda == 1e-16);
    // Lengths default to multiples of sigma.
    CHECK(c.params["separation"].get<double>() == doctest::Approx(4e-5));

    CHECK(throws_code(ErrorCode::ConfigInvalid, [] { cli::parse_config(json{{"seed", 1}}); }));
}

TEST_CASE("resolved config round-trips") {
    const json doc{{"scenario", "wallace_displacement"}, {"params", {{"y", 8.0}}}};
    const auto c = cli::parse_config(doc);
    const auto again = cli::parse_config(json::parse(c.to_json().dump()));
    CHECK(again.to_json() == c.to_json());
}

TEST_CASE("series files carry version, config and units") {
    const auto c = cli::parse_config(json{{"scenario", "hegerfeldt_regrowth"}});
    const auto result = cli::execute(c);
    REQUIRE(!result.series.empty());
    const auto csv = cli::series_csv(c, result.series[0]);
    std::istringstream lines(csv);
    std::string l1, l2, header;
    std::getline(lines, l1);
    std::getline(lines, l2);
    std::getline(lines, header);
    CHECK(l1.find(cli::kVersion) != std::string::npos);
    CHECK(l2.rfind("# config {", 0) == 0);
    CHECK(header.find("dt [s]") != std::string::npos);
    std::size_t rows = 0;
    for (std::string row; std::getline(lines, row);) rows += !row.empty();
    CHECK(rows == result.series[0].columns[0].values.size());
}

TEST_CASE("list") {
    const auto text = cli::list_scenarios();
    CHECK(text.find("hegerfeldt_regrowth") != std::string::npos);
    CHECK(text.find("wallace_displacement") != std::string::npos);
    std::istringstream in(text);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) n += !line.empty() && line[0] != ' ';
    CHECK(n == 6);
}
