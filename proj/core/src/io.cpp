#include "lgfb/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "lgfb/error.hpp"
#include "lgfb/version.hpp"

namespace lgfb {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

[[noreturn]] void io_failure(const std::filesystem::path& path, const std::string& what) {
    throw Error(ErrorCode::IoFailure, path.string() + ": " + what);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) io_failure(path, std::strerror(errno));
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) io_failure(path, "write failed");
}

void write_metadata(std::ostream& out, const Metadata& metadata) {
    for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << '\n';
}

/// One JSON object whose keys must all be consumed.
class Section {
public:
    /// Rejects keys outside `allowed` up front, so a misspelt key is reported
    /// as such rather than as a missing one.
    Section(const json& node, std::string path, std::initializer_list<std::string_view> allowed)
        : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw Error(ErrorCode::ConstraintViolation, label() + " must be an object");
        restrict_to(allowed);
    }

    void restrict_to(std::initializer_list<std::string_view> allowed) const {
        for (const auto& [key, value] : node_.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                throw Error(ErrorCode::UnknownKey, "unknown key '" + field(key) + "'");
            }
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return node_.contains(key); }

    double number(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_number()) throw Error(ErrorCode::ConstraintViolation, field(key) + " must be a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    std::optional<double> optional_number(const std::string& key) {
        return has(key) ? std::optional<double>(number(key)) : std::nullopt;
    }
    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_number_integer()) throw Error(ErrorCode::ConstraintViolation, field(key) + " must be an integer");
        return v.get<int>();
    }
    std::optional<int> optional_integer(const std::string& key) {
        return has(key) ? std::optional<int>(integer(key, 0)) : std::nullopt;
    }
    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_boolean()) throw Error(ErrorCode::ConstraintViolation, field(key) + " must be true or false");
        return v.get<bool>();
    }
    std::string string(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_string()) throw Error(ErrorCode::ConstraintViolation, field(key) + " must be a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, std::string fallback) {
        return has(key) ? string(key) : std::move(fallback);
    }
    std::vector<double> numbers(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_array()) throw Error(ErrorCode::ConstraintViolation, field(key) + " must be an array");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw Error(ErrorCode::ConstraintViolation, field(key) + " must hold numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    Section section(const std::string& key, std::initializer_list<std::string_view> allowed) {
        return Section(at(key), field(key), allowed);
    }

private:
    const json& at(const std::string& key) {
        if (!node_.contains(key)) throw Error(ErrorCode::ConstraintViolation, "missing required key '" + field(key) + "'");
        return node_.at(key);
    }
    [[nodiscard]] std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    [[nodiscard]] std::string label() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

    const json& node_;
    std::string path_;
};

TableProfile load_table(const std::filesystem::path& path, const std::string& source) {
    std::ifstream in(path);
    if (!in) io_failure(path, std::strerror(errno));
    TableProfile table;
    table.source = source;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        double x = 0.0;
        double v = 0.0;
        char comma = 0;
        std::istringstream ss(line);
        if (!(ss >> x >> comma >> v) || comma != ',') {
            if (table.x.empty()) continue;  // column header
            throw Error(ErrorCode::SyntaxError, path.string() + ": malformed table row '" + line + "'");
        }
        table.x.push_back(x);
        table.values.push_back(v);
    }
    return table;
}

TableProfile parse_table(Section& s, const std::filesystem::path& base_dir) {
    if (s.has("path")) {
        s.restrict_to({"type", "path"});
        const std::string source = s.string("path");
        const std::filesystem::path p(source);
        return load_table(p.is_absolute() || base_dir.empty() ? p : base_dir / p, source);
    }
    s.restrict_to({"type", "x", "values"});
    TableProfile t;
    t.x = s.numbers("x");
    t.values = s.numbers("values");
    return t;
}

json table_json(const TableProfile& t) {
    json j{{"type", "table"}};
    if (!t.source.empty()) {
        j["path"] = t.source;
    } else {
        j["x"] = t.x;
        j["values"] = t.values;
    }
    return j;
}

json discretization_json(const Discretization& d) {
    json j{{"L", d.L},
           {"ny", d.ny},
           {"dt", d.dt},
           {"t_end", d.t_end},
           {"cfl_safety", d.cfl_safety},
           {"front_margin", d.front_margin},
           {"record_every", d.record_every},
           {"report_window", d.report_window}};
    if (d.nx) j["nx"] = *d.nx;
    if (d.u_floor) j["u_floor"] = *d.u_floor;
    return j;
}

json config_json(const RunConfig& c) {
    const auto& m = c.model;
    json j{{"a", m.a}, {"b", m.b}, {"d", m.d}, {"mu", m.mu}, {"beta", m.beta}, {"h0", m.h0}};
    j["kernel"] = std::visit(overloaded{
                                 [](const LeslieGower&) { return json{{"type", "leslie_gower"}}; },
                                 [](const HollingTanner& ht) { return json{{"type", "holling_tanner"}, {"m", ht.m}}; },
                             },
                             m.kernel);
    json initial;
    initial["u0"] = std::visit(overloaded{
                                   [](const ConstantProfile& p) { return json{{"type", "constant"}, {"value", p.value}}; },
                                   [](const TableProfile& t) { return table_json(t); },
                               },
                               c.init.u0);
    initial["v0"] = std::visit(overloaded{
                                   [](const CosineProfile& p) { return json{{"type", "cosine"}, {"amplitude", p.amplitude}}; },
                                   [](const TableProfile& t) { return table_json(t); },
                               },
                               c.init.v0);
    j["initial"] = initial;
    j["discretization"] = discretization_json(c.disc);
    json criteria{{"tol_span", c.criteria.tol_span}};
    if (c.criteria.eps_v) criteria["eps_v"] = *c.criteria.eps_v;
    if (c.criteria.eps_speed) criteria["eps_speed"] = *c.criteria.eps_speed;
    j["criteria"] = criteria;
    j["output"] = {{"dir", c.output.dir}, {"snapshot", c.output.snapshot}, {"plot_data", c.output.plot_data}};
    return j;
}

std::string syntax_position(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SyntaxError, "at " + syntax_position(text, e.byte) + ": " + e.what());
    }

    RunConfig c;
    Section top(root, "", {"a", "b", "d", "mu", "beta", "h0", "kernel", "initial", "discretization", "criteria", "output"});
    c.model.a = top.number("a");
    c.model.b = top.number("b");
    c.model.d = top.number("d");
    c.model.mu = top.number("mu");
    c.model.beta = top.number("beta");
    c.model.h0 = top.number("h0");

    if (top.has("kernel")) {
        auto k = top.section("kernel", {"type", "m"});
        const auto type = k.string("type");
        if (type == "leslie_gower") {
            k.restrict_to({"type"});
            c.model.kernel = LeslieGower{};
        } else if (type == "holling_tanner") {
            c.model.kernel = HollingTanner{k.number("m")};
        } else {
            throw Error(ErrorCode::ConstraintViolation, "kernel.type must be leslie_gower or holling_tanner");
        }
    }

    if (top.has("initial")) {
        auto init = top.section("initial", {"u0", "v0"});
        if (init.has("u0")) {
            auto u0 = init.section("u0", {"type", "value", "path", "x", "values"});
            const auto type = u0.string("type");
            if (type == "constant") {
                u0.restrict_to({"type", "value"});
                c.init.u0 = ConstantProfile{u0.number("value")};
            } else if (type == "table") {
                c.init.u0 = parse_table(u0, base_dir);
            } else {
                throw Error(ErrorCode::ConstraintViolation, "initial.u0.type must be constant or table");
            }
        }
        if (init.has("v0")) {
            auto v0 = init.section("v0", {"type", "amplitude", "path", "x", "values"});
            const auto type = v0.string("type");
            if (type == "cosine") {
                v0.restrict_to({"type", "amplitude"});
                c.init.v0 = CosineProfile{v0.number("amplitude", 1.0)};
            } else if (type == "table") {
                c.init.v0 = parse_table(v0, base_dir);
            } else {
                throw Error(ErrorCode::ConstraintViolation, "initial.v0.type must be cosine or table");
            }
        }
    }

    if (top.has("discretization")) {
        auto d = top.section("discretization", {"L", "nx", "ny", "dt", "t_end", "cfl_safety", "u_floor",
                                                         "front_margin", "record_every", "report_window"});
        Discretization def;
        c.disc.L = d.number("L", def.L);
        c.disc.nx = d.optional_integer("nx");
        c.disc.ny = d.integer("ny", def.ny);
        c.disc.dt = d.number("dt", def.dt);
        c.disc.t_end = d.number("t_end", def.t_end);
        c.disc.cfl_safety = d.number("cfl_safety", def.cfl_safety);
        c.disc.u_floor = d.optional_number("u_floor");
        c.disc.front_margin = d.number("front_margin", def.front_margin);
        c.disc.record_every = d.number("record_every", def.record_every);
        c.disc.report_window = d.number("report_window", def.report_window);
    }

    if (top.has("criteria")) {
        auto k = top.section("criteria", {"eps_v", "eps_speed", "tol_span"});
        c.criteria.eps_v = k.optional_number("eps_v");
        c.criteria.eps_speed = k.optional_number("eps_speed");
        c.criteria.tol_span = k.number("tol_span", ClassificationCriteria{}.tol_span);
    }

    if (top.has("output")) {
        auto o = top.section("output", {"dir", "snapshot", "plot_data"});
        OutputSpec def;
        c.output.dir = o.string("dir", def.dir);
        c.output.snapshot = o.boolean("snapshot", def.snapshot);
        c.output.plot_data = o.boolean("plot_data", def.plot_data);
    }

    // Constraint checks are those of the model and the discretization.
    std::vector<Violation> violations;
    auto collect = [&](auto&& fn) {
        try {
            fn();
        } catch (const ValidationError& e) {
            for (auto v : e.violations()) {
                v.message = std::string(to_string(v.code)) + ": " + v.message;
                v.code = ErrorCode::ConstraintViolation;
                violations.push_back(std::move(v));
            }
        } catch (const Error& e) {
            violations.push_back({ErrorCode::ConstraintViolation, "discretization", e.what()});
        }
    };
    collect([&] { (void)validate_params(c.model, c.init); });
    collect([&] { (void)resolve(c.disc, c.model); });
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_failure(path, std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

std::string serialize_config(const RunConfig& config) { return config_json(config).dump(2) + "\n"; }

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

Metadata run_metadata(const RunConfig& config, const Solver& solver, const std::optional<Classification>& verdict) {
    RunConfig echoed = config;
    echoed.disc = solver.disc();  // defaults resolved
    const auto& k = solver.constants();
    const auto thresholds = resolve_criteria(config.criteria, k, config.model);
    Metadata m{
        {"lgfb_version", kVersion},
        {"config", config_json(echoed).dump()},
        {"span_crit", format_double(k.span_crit)},
        {"h0_crit", format_double(k.h0_crit)},
        {"lambda1", format_double(k.lambda1)},
        {"A", format_double(k.A)},
        {"B", format_double(k.B)},
        {"coexistence", format_double(k.coexistence_u)},
        {"eps_v", format_double(thresholds.eps_v)},
        {"eps_speed", format_double(thresholds.eps_speed)},
        {"tol_span", format_double(thresholds.tol_span)},
        {"theory_valid", solver.model().theory_valid ? "true" : "false"},
    };
    if (verdict) {
        m.emplace_back("verdict", std::string(to_string(verdict->verdict)));
        m.emplace_back("verdict_time", format_double(verdict->time));
        m.emplace_back("verdict_rule", verdict->rule);
    }
    return m;
}

void write_series(const Series& series, const std::filesystem::path& path, const Metadata& metadata) {
    auto out = open_out(path);
    write_metadata(out, metadata);
    out << kSeriesHeader << '\n';
    for (const auto& r : series) {
        out << format_double(r.t) << ',' << format_double(r.g) << ',' << format_double(r.h) << ','
            << format_double(r.gdot) << ',' << format_double(r.hdot) << ',' << format_double(r.span) << ','
            << format_double(r.max_v) << ',' << format_double(r.min_u_core) << ',' << format_double(r.max_u) << ','
            << r.floor_hits << '\n';
    }
    close_out(out, path);
}

std::optional<std::string> SeriesFile::find(std::string_view key) const {
    for (const auto& [k, v] : metadata) {
        if (k == key) return v;
    }
    return std::nullopt;
}

SeriesFile read_series(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_failure(path, std::strerror(errno));
    SeriesFile file;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ", 2);
            if (colon != std::string::npos) file.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kSeriesHeader) {
                throw Error(ErrorCode::SyntaxError, path.string() + ":" + std::to_string(line_no) +
                                                        ": expected header '" + std::string(kSeriesHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        SeriesRecord r;
        double* fields[] = {&r.t, &r.g, &r.h, &r.gdot, &r.hdot, &r.span, &r.max_v, &r.min_u_core, &r.max_u};
        const char* p = line.c_str();
        for (double* f : fields) {
            char* end = nullptr;
            *f = std::strtod(p, &end);
            if (end == p || *end != ',') {
                throw Error(ErrorCode::SyntaxError, path.string() + ":" + std::to_string(line_no) + ": malformed row");
            }
            p = end + 1;
        }
        char* end = nullptr;
        r.floor_hits = std::strtoll(p, &end, 10);
        if (end == p || *end != '\0') {
            throw Error(ErrorCode::SyntaxError, path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        file.series.push_back(r);
    }
    if (!header_seen) throw Error(ErrorCode::SyntaxError, path.string() + ": missing column header");
    return file;
}

void write_snapshot(const Solver& solver, const SimState& state, const std::filesystem::path& path,
                    const Metadata& metadata) {
    auto out = open_out(path);
    write_metadata(out, metadata);
    out << "# t: " << format_double(state.t) << '\n';
    out << "# g: " << format_double(state.front.g) << '\n';
    out << "# h: " << format_double(state.front.h) << '\n';
    out << kSnapshotHeader << '\n';
    const auto v = solver.predator_on_prey_grid(state);
    for (std::size_t j = 0; j < state.u.size(); ++j) {
        out << format_double(solver.x_at(j)) << ',' << format_double(state.u[j]) << ',' << format_double(v[j])
            << '\n';
    }
    close_out(out, path);
}

void write_plot_data(const Series& series, double span_crit, const std::filesystem::path& dir,
                     const Metadata& metadata) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) io_failure(dir, ec.message());
    {
        const auto path = dir / "fronts.csv";
        auto out = open_out(path);
        write_metadata(out, metadata);
        out << "t,g,h\n";
        for (const auto& r : series) out << format_double(r.t) << ',' << format_double(r.g) << ',' << format_double(r.h) << '\n';
        close_out(out, path);
    }
    {
        const auto path = dir / "span.csv";
        auto out = open_out(path);
        Metadata md;
        for (const auto& entry : metadata) {
            if (entry.first != "span_crit") md.push_back(entry);
        }
        md.emplace_back("span_crit", format_double(span_crit));
        write_metadata(out, md);
        out << "t,span\n";
        for (const auto& r : series) out << format_double(r.t) << ',' << format_double(r.span) << '\n';
        close_out(out, path);
    }
}

std::string format_grid(const GridTable& table) {
    std::ostringstream out;
    for (const auto& a : table.anomalies) out << "# anomaly: " << a << '\n';
    for (const auto& name : table.axis_names) out << name << ',';
    out << "verdict,decision_time,decision_span,decision_max_v,t_final,g,h,span,max_v,min_u_core,floor_hits,stop,"
           "error\n";
    for (const auto& row : table.rows) {
        for (double c : row.coords) out << format_double(c) << ',';
        if (row.classification) {
            const auto& k = *row.classification;
            out << to_string(k.verdict) << ',' << format_double(k.time) << ',' << format_double(k.span) << ','
                << format_double(k.max_v) << ',';
        } else {
            out << ",,,,";
        }
        if (row.last) {
            const auto& r = *row.last;
            out << format_double(r.t) << ',' << format_double(r.g) << ',' << format_double(r.h) << ','
                << format_double(r.span) << ',' << format_double(r.max_v) << ',' << format_double(r.min_u_core)
                << ',' << row.floor_hits << ','
                << (row.stop == StopReason::Completed ? "completed" : "front_near_truncation") << ',';
        } else {
            out << ",,,,,,,,";
        }
        std::string err = row.error;
        for (auto& ch : err) {
            if (ch == ',' || ch == '\n') ch = ';';
        }
        out << err << '\n';
    }
    return out.str();
}

void write_grid(const GridTable& table, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << format_grid(table);
    close_out(out, path);
}

}  // namespace lgfb
