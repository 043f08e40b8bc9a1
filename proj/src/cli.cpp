#include "grwlab/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "grwlab/error.hpp"

namespace grw::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;
namespace sc = grw::scenarios;

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
    throw Error(ErrorCode::ConfigInvalid, field + ": " + message);
}

void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& where) {
    if (!object.is_object()) invalid(where, "must be an object");
    for (const auto& [key, value] : object.items())
        if (!allowed.contains(key)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            invalid(where.empty() ? key : where + "." + key, "unknown key (allowed: " + list + ")");
        }
}

double number(const json& v, const std::string& field) {
    if (!v.is_number()) invalid(field, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) invalid(field, "must be finite");
    return d;
}

double positive(const json& v, const std::string& field) {
    const double d = number(v, field);
    if (!(d > 0.0)) invalid(field, "must be > 0");
    return d;
}

std::uint64_t count(const json& v, const std::string& field, std::uint64_t min) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        invalid(field, "must be a non-negative integer");
    const auto n = v.get<std::uint64_t>();
    if (n < min) invalid(field, "must be >= " + std::to_string(min));
    return n;
}

Complex complex_value(const json& v, const std::string& field) {
    if (v.is_number()) return {number(v, field), 0.0};
    if (v.is_array() && v.size() == 2) return {number(v[0], field + "[0]"), number(v[1], field + "[1]")};
    invalid(field, "must be a number or a [re, im] pair");
}

// Scenario parameter tables: key -> default (as a function of sigma and the time unit) + validator.
struct ParamSpec {
    std::function<ordered_json(double sigma, double tau, const RunConfig&)> default_value;
    std::function<void(const json&, const std::string&)> validate;
};

void v_number(const json& v, const std::string& f) { number(v, f); }
void v_positive(const json& v, const std::string& f) { positive(v, f); }
void v_complex(const json& v, const std::string& f) { complex_value(v, f); }
void v_trials(const json& v, const std::string& f) { count(v, f, 1); }

const std::map<std::string, std::map<std::string, ParamSpec>>& param_tables() {
    auto fixed = [](ordered_json value) {
        return [value](double, double, const RunConfig&) { return value; };
    };
    auto sigmas = [](double multiple) {
        return [multiple](double sigma, double, const RunConfig&) { return ordered_json(multiple * sigma); };
    };
    static const std::map<std::string, std::map<std::string, ParamSpec>> tables{
        {"measurement_chain",
         {{"a", {fixed(ordered_json::array({std::sqrt(0.7), 0.0})), v_complex}},
          {"b", {fixed(ordered_json::array({std::sqrt(0.3), 0.0})), v_complex}},
          {"n_pointer", {fixed(1), [](const json& v, const std::string& f) { count(v, f, 1); }}},
          {"separation", {sigmas(4.0), v_positive}},
          {"branch_width", {sigmas(0.05), v_positive}},
          {"n_trials", {fixed(10000), v_trials}}}},
        {"marble_in_box",
         {{"inside_weight", {fixed(0.95),
                             [](const json& v, const std::string& f) {
                                 const double w = number(v, f);
                                 if (!(w > 0.0 && w < 1.0)) invalid(f, "must lie in the open interval (0, 1)");
                             }}},
          {"box", {[](double s, double, const RunConfig&) { return ordered_json::array({-5.0 * s, 5.0 * s}); },
                   [](const json& v, const std::string& f) {
                       if (!v.is_array() || v.size() != 2) invalid(f, "must be a [lo, hi] pair");
                       if (!(number(v[1], f + "[1]") > number(v[0], f + "[0]"))) invalid(f, "requires hi > lo");
                   }}},
          {"q", {fixed(kDefaultFuzzyQ),
                 [](const json& v, const std::string& f) {
                     const double q = number(v, f);
                     if (!(q > 0.0 && q < 0.5))
                         invalid(f, "q = " + v.dump() + " violates the constraint 0 < q < 0.5 (open interval (0, 0.5))");
                 }}},
          {"marble_size", {sigmas(1.0), v_positive}},
          {"branch_width", {sigmas(0.2), v_positive}},
          {"n_constituents", {fixed(3), [](const json& v, const std::string& f) { count(v, f, 1); }}}}},
        {"billiard_collision",
         {{"a", {fixed(ordered_json::array({std::sqrt(0.9), 0.0})), v_complex}},
          {"b", {fixed(ordered_json::array({std::sqrt(0.1), 0.0})), v_complex}},
          {"p_position", {sigmas(-1.0), v_number}},
          {"q_position", {sigmas(1.0), v_number}}}},
        {"wallace_displacement",
         {{"x", {sigmas(0.0), v_number}}, {"y", {sigmas(10.0), v_number}}, {"s", {sigmas(1.0), v_positive}}}},
        {"hegerfeldt_regrowth",
         {{"W", {[](double, double, const RunConfig& c) { return ordered_json(c.window); }, v_positive}},
          {"packet_width", {sigmas(1.0), v_positive}},
          {"dt_list", {[](double, double tau, const RunConfig&) {
                           ordered_json list = ordered_json::array();
                           for (double m : {0.0, 1e-6, 2e-6, 4e-6, 8e-6, 1.6e-5, 3.2e-5, 6.4e-5}) list.push_back(m * tau);
                           return list;
                       },
                       [](const json& v, const std::string& f) {
                           if (!v.is_array() || v.empty()) invalid(f, "must be a non-empty array");
                           for (std::size_t i = 0; i < v.size(); ++i)
                               if (number(v[i], f + "[" + std::to_string(i) + "]") < 0.0)
                                   invalid(f + "[" + std::to_string(i) + "]", "must be >= 0");
                       }}}}},
        {"kernel_dilemma",
         {{"separation", {sigmas(4.0), v_positive}},
          {"branch_width", {sigmas(0.05), v_positive}},
          {"packet_width", {sigmas(0.5), v_positive}},
          {"dt", {[](double, double tau, const RunConfig&) { return ordered_json(1e-3 * tau); }, v_positive}},
          {"n_trials", {fixed(2000), v_trials}}}},
    };
    return tables;
}

std::optional<Grid1D> default_grid(const std::string& scenario, double sigma) {
    if (scenario == "marble_in_box" || scenario == "hegerfeldt_regrowth" || scenario == "kernel_dilemma")
        return Grid1D(-20.0 * sigma, 20.0 * sigma, 4096);
    if (scenario == "wallace_displacement") return Grid1D(-40.0 * sigma, 40.0 * sigma, 8192);
    return std::nullopt;
}

CollapseKernel kernel_of(const RunConfig& c) {
    if (c.kernel == "gaussian") return CollapseKernel::gaussian(c.physics.sigma);
    if (c.kernel == "compact_support") return CollapseKernel::compact_support(c.physics.sigma, c.window);
    return CollapseKernel::ideal();
}

Interval interval_of(const json& v) { return {v[0].get<double>(), v[1].get<double>()}; }

std::string format_double(double v) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
    return std::string(buffer, end);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << contents;
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

ordered_json event_json(const CollapseEvent& e) {
    ordered_json j{{"time", e.time}, {"particle", e.particle}, {"center", e.center}, {"kernel", e.kernel.name()}};
    if (e.selected_branch) j["selected_branch"] = *e.selected_branch;
    j["pre_weights"] = e.pre_weights;
    j["post_weights"] = e.post_weights;
    return j;
}

sc::Series events_series(const std::vector<CollapseEvent>& events) {
    sc::Series s{"events", {{"index", "1", {}}, {"time", "s", {}}, {"particle", "1", {}}, {"center", "m", {}},
                            {"post_weight_max", "1", {}}}};
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        double max_w = 0.0;
        for (double w : e.post_weights) max_w = std::max(max_w, w);
        s.columns[0].values.push_back(static_cast<double>(i));
        s.columns[1].values.push_back(e.time);
        s.columns[2].values.push_back(static_cast<double>(e.particle));
        s.columns[3].values.push_back(e.center);
        s.columns[4].values.push_back(max_w);
    }
    return s;
}

bool is_validation(ErrorCode code) {
    return code == ErrorCode::ConfigInvalid || code == ErrorCode::InvalidArgument || code == ErrorCode::NotNormalized ||
           code == ErrorCode::DegenerateRegion;
}

}  // namespace

// ---------------------------------------------------------------------------

ordered_json RunConfig::to_json() const {
    ordered_json j;
    j["scenario"] = scenario;
    j["units"] = units == UnitMode::SI ? "si" : "scaled";
    j["seed"] = seed;
    j["output_dir"] = output_dir.generic_string();
    j["physics"] = {{"hbar", physics.hbar}, {"mass", physics.mass},   {"lambda", physics.lambda},
                    {"sigma", physics.sigma}, {"kernel", kernel}, {"W", window}};
    if (grid) j["grid"] = {{"x_min", grid->x_min()}, {"x_max", grid->x_max()}, {"n_points", grid->size()}};
    j["params"] = params;
    return j;
}

RunConfig parse_config(const json& doc, const Overrides& overrides) {
    reject_unknown(doc, {"scenario", "units", "seed", "output_dir", "physics", "grid", "params"}, "");
    RunConfig c;

    if (!doc.contains("scenario") || !doc["scenario"].is_string()) invalid("scenario", "required string");
    c.scenario = doc["scenario"].get<std::string>();
    const auto& tables = param_tables();
    if (!tables.contains(c.scenario)) invalid("scenario", "unknown scenario '" + c.scenario + "' (see `grwlab list`)");

    if (doc.contains("units")) {
        const auto& u = doc["units"];
        if (u == "scaled")
            c.units = UnitMode::Scaled;
        else if (u == "si")
            c.units = UnitMode::SI;
        else
            invalid("units", "must be \"scaled\" or \"si\"");
    }
    if (overrides.units) c.units = *overrides.units;
    c.physics = c.units == UnitMode::SI ? PhysicsParams::si() : PhysicsParams::scaled();

    if (doc.contains("seed")) c.seed = count(doc["seed"], "seed", 0);
    if (overrides.seed) c.seed = *overrides.seed;
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string()) invalid("output_dir", "must be a string");
        c.output_dir = doc["output_dir"].get<std::string>();
    }
    if (overrides.output_dir) c.output_dir = *overrides.output_dir;

    bool window_given = false;
    if (doc.contains("physics")) {
        const auto& ph = doc["physics"];
        reject_unknown(ph, {"hbar", "mass", "lambda", "sigma", "kernel", "W"}, "physics");
        if (ph.contains("hbar")) c.physics.hbar = positive(ph["hbar"], "physics.hbar");
        if (ph.contains("mass")) c.physics.mass = positive(ph["mass"], "physics.mass");
        if (ph.contains("lambda")) c.physics.lambda = positive(ph["lambda"], "physics.lambda");
        if (ph.contains("sigma")) c.physics.sigma = positive(ph["sigma"], "physics.sigma");
        if (ph.contains("kernel")) {
            const auto& k = ph["kernel"];
            if (!k.is_string() || (k != "gaussian" && k != "compact_support" && k != "ideal"))
                invalid("physics.kernel", "must be one of gaussian, compact_support, ideal");
            c.kernel = k.get<std::string>();
        }
        if (ph.contains("W")) {
            c.window = positive(ph["W"], "physics.W");
            window_given = true;
        }
    }
    if (!window_given) c.window = c.physics.sigma;

    const double sigma = c.physics.sigma;
    const double tau = c.physics.mass * sigma * sigma / c.physics.hbar;

    c.grid = default_grid(c.scenario, sigma);
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        reject_unknown(g, {"x_min", "x_max", "n_points"}, "grid");
        for (const char* key : {"x_min", "x_max", "n_points"})
            if (!g.contains(key)) invalid(std::string("grid.") + key, "required when grid is given");
        const double lo = number(g["x_min"], "grid.x_min");
        const double hi = number(g["x_max"], "grid.x_max");
        const auto n = count(g["n_points"], "grid.n_points", 2);
        if (!(hi > lo)) invalid("grid", "requires x_max > x_min");
        c.grid = Grid1D(lo, hi, static_cast<std::size_t>(n));
    }

    const auto& table = tables.at(c.scenario);
    json given = json::object();
    if (doc.contains("params")) {
        std::set<std::string> allowed;
        for (const auto& [key, entry] : table) allowed.insert(key);
        reject_unknown(doc["params"], allowed, "params");
        given = doc["params"];
    }
    for (const auto& [key, entry] : table) {
        if (given.contains(key)) {
            entry.validate(given[key], "params." + key);
            c.params[key] = given[key];
        } else {
            c.params[key] = entry.default_value(sigma, tau, c);
        }
    }

    if (c.scenario == "measurement_chain" || c.scenario == "billiard_collision") {
        const double wa = std::norm(complex_value(c.params["a"], "params.a"));
        const double wb = std::norm(complex_value(c.params["b"], "params.b"));
        if (std::abs(wa + wb - 1.0) > kNormTolerance) invalid("params.a/params.b", "|a|^2 + |b|^2 must equal 1");
    }
    if (c.scenario == "measurement_chain" && c.kernel == "ideal")
        invalid("physics.kernel", "measurement_chain needs gaussian or compact_support");
    if (c.scenario == "wallace_displacement" && c.params["x"] == c.params["y"])
        invalid("params.x", "collapse center x must differ from tail center y");
    return c;
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("malformed config: ") + e.what());
    }
    return parse_config(doc, overrides);
}

sc::ScenarioResult execute(const RunConfig& c) {
    const auto& p = c.params;
    const CollapseKernel kernel = kernel_of(c);
    if (c.scenario == "measurement_chain") {
        sc::MeasurementChainParams m;
        m.a = complex_value(p["a"], "a");
        m.b = complex_value(p["b"], "b");
        m.n_pointer = p["n_pointer"].get<std::size_t>();
        m.separation = p["separation"].get<double>();
        m.branch_width = p["branch_width"].get<double>();
        m.kernel = kernel;
        m.physics = c.physics;
        m.n_trials = p["n_trials"].get<std::size_t>();
        m.seed = c.seed;
        return sc::measurement_chain(m);
    }
    if (c.scenario == "marble_in_box") {
        sc::MarbleParams m{.grid = *c.grid};
        m.inside_weight = p["inside_weight"].get<double>();
        m.box = interval_of(p["box"]);
        m.q = p["q"].get<double>();
        m.marble_size = p["marble_size"].get<double>();
        m.branch_width = p["branch_width"].get<double>();
        m.n_constituents = p["n_constituents"].get<std::size_t>();
        m.kernel = kernel;
        m.physics = c.physics;
        m.seed = c.seed;
        return sc::marble_in_box(m);
    }
    if (c.scenario == "billiard_collision") {
        sc::BilliardParams m;
        m.a = complex_value(p["a"], "a");
        m.b = complex_value(p["b"], "b");
        m.p_position = p["p_position"].get<double>();
        m.q_position = p["q_position"].get<double>();
        return sc::billiard_collision(m);
    }
    if (c.scenario == "wallace_displacement") {
        sc::WallaceParams m{.grid = *c.grid};
        m.collapse_center = p["x"].get<double>();
        m.tail_center = p["y"].get<double>();
        m.tail_width = p["s"].get<double>();
        m.sigma = c.physics.sigma;
        return sc::wallace_displacement(m);
    }
    if (c.scenario == "hegerfeldt_regrowth") {
        sc::HegerfeldtParams m{.grid = *c.grid};
        m.window = p["W"].get<double>();
        m.packet_width = p["packet_width"].get<double>();
        m.dt_list = p["dt_list"].get<std::vector<double>>();
        m.physics = c.physics;
        return sc::hegerfeldt_regrowth(m);
    }
    if (c.scenario == "kernel_dilemma") {
        sc::DilemmaParams m{.grid = *c.grid};
        m.gaussian = CollapseKernel::gaussian(c.physics.sigma);
        m.compact = CollapseKernel::compact_support(c.physics.sigma, c.window);
        m.separation = p["separation"].get<double>();
        m.branch_width = p["branch_width"].get<double>();
        m.packet_width = p["packet_width"].get<double>();
        m.dt = p["dt"].get<double>();
        m.physics = c.physics;
        m.n_trials = p["n_trials"].get<std::size_t>();
        m.seed = c.seed;
        return sc::kernel_dilemma(m);
    }
    invalid("scenario", "unknown scenario '" + c.scenario + "'");
}

ordered_json summary_json(const RunConfig& c, const sc::ScenarioResult& r) {
    ordered_json j;
    j["artifact"] = "grwlab";
    j["version"] = kVersion;
    j["scenario"] = r.name;
    j["config"] = c.to_json();
    j["parameters"] = r.parameters;
    ordered_json summary = ordered_json::object();
    for (const auto& s : r.summary) {
        ordered_json entry{{"value", s.value}};
        if (s.half_width) entry["half_width"] = *s.half_width;
        if (!s.unit.empty()) entry["unit"] = s.unit;
        summary[s.name] = entry;
    }
    j["summary"] = summary;
    ordered_json checks = ordered_json::array();
    for (const auto& ch : r.checks) checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    j["checks"] = checks;
    j["all_passed"] = r.all_passed();
    j["warnings"] = r.warnings;
    ordered_json trials = ordered_json::array();
    for (const auto& t : r.trials) {
        ordered_json rec = ordered_json::object();
        for (const auto& [k, v] : t) rec[k] = v;
        trials.push_back(rec);
    }
    j["trials"] = trials;
    if (r.events.size() <= 16) {
        ordered_json events = ordered_json::array();
        for (const auto& e : r.events) events.push_back(event_json(e));
        j["events"] = events;
    } else {
        j["events"] = "series.events.csv";
    }
    return j;
}

std::string series_csv(const RunConfig& c, const sc::Series& series) {
    std::ostringstream os;
    os << "# grwlab " << kVersion << " series " << series.name << '\n';
    os << "# config " << c.to_json().dump() << '\n';
    for (std::size_t col = 0; col < series.columns.size(); ++col) {
        const auto& column = series.columns[col];
        os << (col ? "," : "") << column.name << " [" << column.unit << "]" << (col == 0 ? " (coordinate)" : "");
    }
    os << '\n';
    const std::size_t rows = series.columns.empty() ? 0 : series.columns.front().values.size();
    for (std::size_t row = 0; row < rows; ++row) {
        for (std::size_t col = 0; col < series.columns.size(); ++col)
            os << (col ? "," : "") << format_double(series.columns[col].values.at(row));
        os << '\n';
    }
    return os.str();
}

std::vector<std::filesystem::path> write_outputs(const RunConfig& c, const sc::ScenarioResult& r) {
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + c.output_dir.string());
    std::vector<std::filesystem::path> written;
    const auto summary_path = c.output_dir / ("summary." + r.name + ".json");
    write_file(summary_path, summary_json(c, r).dump(2) + "\n");
    written.push_back(summary_path);
    auto all_series = r.series;
    if (r.events.size() > 16) all_series.push_back(events_series(r.events));
    for (const auto& s : all_series) {
        const auto path = c.output_dir / ("series." + s.name + ".csv");
        write_file(path, series_csv(c, s));
        written.push_back(path);
    }
    return written;
}

std::string digest(const sc::ScenarioResult& r) {
    std::ostringstream os;
    os << "scenario " << r.name << '\n';
    for (const auto& s : r.summary) {
        os << "  " << s.name << " = " << format_double(s.value);
        if (s.half_width) os << " +/- " << format_double(*s.half_width);
        if (!s.unit.empty()) os << ' ' << s.unit;
        os << '\n';
    }
    for (const auto& ch : r.checks) os << "  [" << (ch.passed ? "PASS" : "FAIL") << "] " << ch.name << ": " << ch.detail << '\n';
    for (const auto& w : r.warnings) os << "  warning: " << w << '\n';
    return os.str();
}

std::string list_scenarios() {
    std::ostringstream os;
    for (const auto& info : sc::catalog()) os << info.name << "  " << info.description << '\n';
    return os.str();
}

int run(const std::filesystem::path& config_path, const Overrides& overrides, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        config = load_config(config_path, overrides);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::IoError ? 2 : 1;
    }
    try {
        const auto result = execute(config);
        const auto files = write_outputs(config, result);
        out << digest(result);
        for (const auto& f : files) out << "  wrote " << f.generic_string() << '\n';
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_validation(e.code()) ? 1 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace grw::cli
