#include "lgfb/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lgfb/analysis.hpp"
#include "lgfb/error.hpp"
#include "lgfb/io.hpp"
#include "lgfb/model.hpp"
#include "lgfb/solver.hpp"
#include "lgfb/sweep.hpp"
#include "lgfb/version.hpp"

namespace lgfb::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::SyntaxError:
        case ErrorCode::UnknownKey:
        case ErrorCode::ConstraintViolation:
        case ErrorCode::IoFailure:
        case ErrorCode::NonPositiveParameter:
        case ErrorCode::InitialProfileViolation:
        case ErrorCode::InvalidDiscretization:
        case ErrorCode::DomainTooSmall:
        case ErrorCode::PreconditionViolated:
        case ErrorCode::AssumptionViolated:
        case ErrorCode::EmptySeries:
            return kUsage;
        case ErrorCode::UndecidedProbe:
            return kUndecided;
        default:
            return kSolverError;
    }
}

double parse_number(const std::string& text, const std::string& what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw UsageError("invalid number '" + text + "' for " + what);
    return value;
}

/// key=value tokens; only keys in `allowed` are accepted.
std::map<std::string, double> parse_assignments(const std::vector<std::string>& tokens,
                                                const std::vector<std::string>& allowed) {
    std::map<std::string, double> out;
    for (const auto& token : tokens) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("expected key=value, got '" + token + "'");
        const auto key = token.substr(0, eq);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw UsageError("unknown parameter '" + key + "'");
        }
        out[key] = parse_number(token.substr(eq + 1), key);
    }
    return out;
}

GridAxis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--axis expects name=v1,v2,..., got '" + text + "'");
    GridAxis axis{text.substr(0, eq), {}};
    std::stringstream ss(text.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) axis.values.push_back(parse_number(item, "--axis " + axis.name));
    }
    return axis;
}

/// Options shared by every subcommand that starts from a config file.
struct RunOptions {
    std::string config;
    std::optional<std::string> out;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<int> nx;
    std::optional<int> ny;
    std::optional<double> half_width;
    std::optional<double> record_every;
    std::optional<long long> seed;  // reserved; the solver is deterministic

    void attach(CLI::App& app) {
        app.add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        add_overrides(app);
    }

    void add_overrides(CLI::App& app) {
        app.add_option("--out", out, "Output directory (overrides output.dir)");
        app.add_option("--t-end", t_end, "Final time");
        app.add_option("--dt", dt, "Largest time step");
        app.add_option("--nx", nx, "Prey grid intervals");
        app.add_option("--ny", ny, "Predator grid intervals");
        app.add_option("--domain-half-width", half_width, "Half-width L of the prey domain");
        app.add_option("--record-every", record_every, "Record interval");
        app.add_option("--seed", seed, "Reserved, unused");
    }

    [[nodiscard]] RunConfig load() const {
        RunConfig cfg = load_config(config);
        apply(cfg);
        return cfg;
    }

    void apply(RunConfig& cfg) const {
        if (out) cfg.output.dir = *out;
        if (t_end) cfg.disc.t_end = *t_end;
        if (dt) cfg.disc.dt = *dt;
        if (nx) cfg.disc.nx = *nx;
        if (ny) cfg.disc.ny = *ny;
        if (half_width) cfg.disc.L = *half_width;
        if (record_every) cfg.disc.record_every = *record_every;
    }
};

void print_classification(std::ostream& out, const Classification& c) {
    out << "verdict: " << to_string(c.verdict) << '\n'
        << "decided_at: " << format_double(c.time) << '\n'
        << "rule: " << c.rule << '\n'
        << "span: " << format_double(c.span) << '\n'
        << "max_v: " << format_double(c.max_v) << '\n'
        << "speed: " << format_double(c.speed) << '\n';
    if (!c.theory_valid) out << "note: b >= 1, the long-time theory does not apply\n";
}

const char* stop_name(StopReason s) {
    return s == StopReason::Completed ? "completed" : "front_near_truncation";
}

int cmd_simulate(const RunOptions& opts, std::ostream& out) {
    const RunConfig cfg = opts.load();
    const auto model = validate_params(cfg.model, cfg.init);
    for (const auto& w : model.warnings) out << "warning: " << w << '\n';
    const Solver solver(model, cfg.disc);
    const auto result = simulate(model, solver.disc());
    const auto thresholds = resolve_criteria(cfg.criteria, solver.constants(), cfg.model);
    const auto verdict = classify(result.series, solver.constants(), thresholds, model.theory_valid);
    const auto metadata = run_metadata(cfg, solver, verdict);

    const fs::path dir(cfg.output.dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, dir.string() + ": " + ec.message());
    write_series(result.series, dir / "series.csv", metadata);
    if (cfg.output.snapshot) write_snapshot(solver, result.final_state, dir / "snapshot.csv", metadata);
    if (cfg.output.plot_data) write_plot_data(result.series, solver.constants().span_crit, dir / "plot", metadata);

    print_classification(out, verdict);
    const auto& h = result.health;
    out << "t_final: " << format_double(result.final_state.t) << '\n'
        << "stop: " << stop_name(h.stop) << '\n'
        << "steps: " << h.steps << '\n'
        << "floor_hits: " << h.floor_hits << '\n'
        << "max_u_over_A: " << format_double(h.max_u_ratio) << '\n'
        << "max_v_over_B: " << format_double(h.max_v_ratio) << '\n'
        << "output: " << dir.string() << '\n';
    return kOk;
}

struct ClassifyOptions {
    std::string series;
    std::optional<std::string> config;
    std::optional<double> eps_v;
    std::optional<double> eps_speed;
    std::optional<double> tol_span;
};

int cmd_classify(const ClassifyOptions& opts, std::ostream& out) {
    const auto file = read_series(opts.series);
    RunConfig cfg;
    if (opts.config) {
        cfg = load_config(*opts.config);
    } else {
        const auto echoed = file.find("config");
        if (!echoed) throw UsageError("series file has no config metadata; pass --config");
        cfg = parse_config(*echoed, fs::path(opts.series).parent_path());
    }
    if (opts.eps_v) cfg.criteria.eps_v = *opts.eps_v;
    if (opts.eps_speed) cfg.criteria.eps_speed = *opts.eps_speed;
    if (opts.tol_span) cfg.criteria.tol_span = *opts.tol_span;
    const auto model = validate_params(cfg.model, cfg.init);
    const auto constants = derived_constants(model);
    const auto c = classify(file.series, constants, resolve_criteria(cfg.criteria, constants, cfg.model),
                            model.theory_valid);
    print_classification(out, c);
    return c.verdict == Verdict::Undecided ? kUndecided : kOk;
}

struct BisectCliOptions {
    double lo = 1e-3;
    double hi = 10.0;
    double width = 0.05;
    BisectOptions bisect;
};

int cmd_bisect(const RunOptions& opts, const BisectCliOptions& b, std::ostream& out) {
    const RunConfig cfg = opts.load();
    auto options = b.bisect;
    options.criteria = cfg.criteria;
    const auto bracket = bisect_beta(cfg.model, cfg.init, cfg.disc, b.lo, b.hi, b.width, options);
    out << "beta,verdict,decided_at,span\n";
    for (const auto& p : bracket.probes) {
        out << format_double(p.beta) << ',' << to_string(p.classification.verdict) << ','
            << format_double(p.classification.time) << ',' << format_double(p.classification.span) << '\n';
    }
    out << "lo: " << format_double(bracket.lo) << " (Vanishing)\n"
        << "hi: " << format_double(bracket.hi) << " (Spreading)\n"
        << "width: " << format_double(bracket.width()) << '\n'
        << "runs: " << bracket.runs << '\n';
    if (bracket.undecided_beta) {
        out << "undecided_at: " << format_double(*bracket.undecided_beta) << " (try a longer --t-end)\n";
        return kUndecided;
    }
    return kOk;
}

struct SweepCliOptions {
    std::vector<std::string> axes;
    unsigned threads = 1;
    std::size_t max_runs = GridOptions{}.max_runs;
};

int cmd_sweep(const RunOptions& opts, const SweepCliOptions& s, std::ostream& out) {
    const RunConfig cfg = opts.load();
    std::vector<GridAxis> axes;
    for (const auto& a : s.axes) axes.push_back(parse_axis(a));
    GridOptions options;
    options.threads = s.threads;
    options.max_runs = s.max_runs;
    options.criteria = cfg.criteria;
    const auto table = run_grid(axes, cfg.model, cfg.init, cfg.disc, options);
    const fs::path dir(cfg.output.dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, dir.string() + ": " + ec.message());
    write_grid(table, dir / "grid.csv");
    out << format_grid(table);
    return kOk;
}

const std::vector<std::string> kModelKeys{"a", "b", "d", "mu", "beta", "h0", "m"};

int cmd_thresholds(const std::vector<std::string>& tokens, const std::optional<std::string>& config,
                   std::ostream& out) {
    RunConfig cfg;
    cfg.model = ModelParams{1.0, 0.5, 1.0, 1.0, 1.0, 1.0, LeslieGower{}};
    if (config) cfg = load_config(*config);
    for (const auto& [key, value] : parse_assignments(tokens, kModelKeys)) {
        auto& p = cfg.model;
        if (key == "a") p.a = value;
        else if (key == "b") p.b = value;
        else if (key == "d") p.d = value;
        else if (key == "mu") p.mu = value;
        else if (key == "beta") p.beta = value;
        else if (key == "h0") p.h0 = value;
        else if (key == "m") p.kernel = HollingTanner{value};
    }
    const auto model = validate_params(cfg.model, cfg.init);
    const auto k = derived_constants(model);
    const auto& p = model.params;
    out << "a = " << format_double(p.a) << '\n'
        << "b = " << format_double(p.b) << '\n'
        << "d = " << format_double(p.d) << '\n'
        << "mu = " << format_double(p.mu) << '\n'
        << "h0 = " << format_double(p.h0) << '\n'
        << "span_crit = " << format_double(k.span_crit) << '\n'
        << "h0_crit = " << format_double(k.h0_crit) << '\n'
        << "lambda1 = " << format_double(k.lambda1) << '\n'
        << "A = " << format_double(k.A) << '\n'
        << "B = " << format_double(k.B) << '\n'
        << "coexistence = " << format_double(k.coexistence_u) << '\n';
    for (const auto& w : model.warnings) out << "warning: " << w << '\n';
    return kOk;
}

int cmd_bounds(const std::vector<std::string>& tokens, std::ostream& out) {
    const auto values = parse_assignments(tokens, {"a", "b", "i"});
    for (const char* key : {"a", "b", "i"}) {
        if (!values.contains(key)) throw UsageError(std::string("bounds needs ") + key + "=...");
    }
    const double i_max = values.at("i");
    if (i_max != static_cast<int>(i_max)) throw UsageError("i must be an integer");
    const auto seq = bound_sequences(values.at("a"), values.at("b"), static_cast<int>(i_max));
    out << "# limit: " << format_double(seq.limit) << '\n' << "i,lower,upper\n";
    for (std::size_t i = 0; i < seq.lower.size(); ++i) {
        out << i + 1 << ',' << format_double(seq.lower[i]) << ',' << format_double(seq.upper[i]) << '\n';
    }
    return kOk;
}

int cmd_plot_data(const std::string& series, const std::string& dir, std::optional<double> span_crit,
                  std::ostream& out) {
    const auto file = read_series(series);
    if (!span_crit) {
        const auto stored = file.find("span_crit");
        if (!stored) throw UsageError("series file has no span_crit metadata; pass --span-crit");
        span_crit = parse_number(*stored, "span_crit metadata");
    }
    write_plot_data(file.series, *span_crit, dir, file.metadata);
    out << "wrote " << (fs::path(dir) / "fronts.csv").string() << " and " << (fs::path(dir) / "span.csv").string()
        << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Leslie-Gower predator-prey model with free boundaries", "lgfb"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    RunOptions run_opts;

    auto* simulate_cmd = app.add_subcommand("simulate", "Run one simulation; write series, snapshot and verdict");
    run_opts.attach(*simulate_cmd);

    ClassifyOptions classify_opts;
    auto* classify_cmd = app.add_subcommand("classify", "Classify a written series file");
    classify_cmd->add_option("series", classify_opts.series, "Series CSV")->required()->check(CLI::ExistingFile);
    classify_cmd->add_option("--config", classify_opts.config, "Config to take constants from")
        ->check(CLI::ExistingFile);
    classify_cmd->add_option("--eps-v", classify_opts.eps_v, "Vanishing threshold on max v");
    classify_cmd->add_option("--eps-speed", classify_opts.eps_speed, "Vanishing threshold on front speed");
    classify_cmd->add_option("--tol-span", classify_opts.tol_span, "Relative margin on span_crit");

    BisectCliOptions bisect_opts;
    auto* bisect_cmd = app.add_subcommand("bisect-beta", "Bracket the beta threshold between vanishing and spreading");
    run_opts.attach(*bisect_cmd);
    bisect_cmd->add_option("--lo", bisect_opts.lo, "Initial lower beta")->capture_default_str();
    bisect_cmd->add_option("--hi", bisect_opts.hi, "Initial upper beta")->capture_default_str();
    bisect_cmd->add_option("--width", bisect_opts.width, "Target bracket width")->capture_default_str();
    bisect_cmd->add_option("--expand-factor", bisect_opts.bisect.expand_factor, "Endpoint expansion factor")
        ->capture_default_str();
    bisect_cmd->add_option("--max-expansions", bisect_opts.bisect.max_expansions, "Endpoint expansion cap")
        ->capture_default_str();

    SweepCliOptions sweep_opts;
    auto* sweep_cmd = app.add_subcommand("sweep", "Classify a grid of parameter values");
    run_opts.attach(*sweep_cmd);
    sweep_cmd->add_option("--axis", sweep_opts.axes, "name=v1,v2,... (repeatable)")->required();
    sweep_cmd->add_option("--threads", sweep_opts.threads, "Worker threads")->capture_default_str();
    sweep_cmd->add_option("--max-runs", sweep_opts.max_runs, "Largest allowed grid")->capture_default_str();

    std::vector<std::string> threshold_tokens;
    std::optional<std::string> threshold_config;
    auto* thresholds_cmd = app.add_subcommand("thresholds", "Print the derived constants");
    thresholds_cmd->add_option("params", threshold_tokens, "key=value for a, b, d, mu, beta, h0, m");
    thresholds_cmd->add_option("--config", threshold_config, "Take parameters from a config")
        ->check(CLI::ExistingFile);

    std::vector<std::string> bound_tokens;
    auto* bounds_cmd = app.add_subcommand("bounds", "Print the iterated bounds on the limits");
    bounds_cmd->add_option("params", bound_tokens, "a=... b=... i=...")->required();

    std::string plot_series;
    std::string plot_dir = "plot";
    std::optional<double> plot_span_crit;
    auto* plot_cmd = app.add_subcommand("plot-data", "Columnar fronts and span files from a series");
    plot_cmd->add_option("series", plot_series, "Series CSV")->required()->check(CLI::ExistingFile);
    plot_cmd->add_option("--out", plot_dir, "Output directory")->capture_default_str();
    plot_cmd->add_option("--span-crit", plot_span_crit, "Reference span (default: from metadata)");

    auto usage = [&](const std::string& message) {
        err << "error: " << message << "\n\n";
        const auto parsed = app.get_subcommands();
        err << (parsed.empty() ? app.help() : parsed.front()->help());
        return kUsage;
    };

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto parsed = app.get_subcommands();
        out << (parsed.empty() ? app.help() : parsed.front()->help());
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        return usage(e.what());
    }

    try {
        if (*simulate_cmd) return cmd_simulate(run_opts, out);
        if (*classify_cmd) return cmd_classify(classify_opts, out);
        if (*bisect_cmd) return cmd_bisect(run_opts, bisect_opts, out);
        if (*sweep_cmd) return cmd_sweep(run_opts, sweep_opts, out);
        if (*thresholds_cmd) return cmd_thresholds(threshold_tokens, threshold_config, out);
        if (*bounds_cmd) return cmd_bounds(bound_tokens, out);
        if (*plot_cmd) return cmd_plot_data(plot_series, plot_dir, plot_span_crit, out);
    } catch (const UsageError& e) {
        return usage(e.what());
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        for (const auto& v : e.violations()) err << "  " << v.field << ": " << v.message << '\n';
        return exit_code_for(e.code());
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
    return usage("no subcommand");
}

}  // namespace lgfb::cli
