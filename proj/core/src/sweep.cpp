#include "lgfb/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>

#include "lgfb/error.hpp"

namespace lgfb {

Classification classify_run(const ModelParams& params, const InitialData& init, const Discretization& disc,
                            const ClassificationCriteria& criteria) {
    const auto model = validate_params(params, init);
    const auto constants = derived_constants(model);
    const auto run = simulate(model, disc);
    return classify(run.series, constants, resolve_criteria(criteria, constants, params), model.theory_valid);
}

BetaBracket bisect_beta(const ModelParams& params, const InitialData& init, const Discretization& disc,
                        double lo0, double hi0, double width_tol, const BisectOptions& options) {
    if (!(lo0 > 0.0) || !(hi0 > lo0) || !(width_tol > 0.0) || !(options.expand_factor > 1.0)) {
        throw Error(ErrorCode::PreconditionViolated, "need 0 < lo0 < hi0, width_tol > 0, expand_factor > 1");
    }
    {
        ModelParams probe = params;
        probe.beta = lo0;
        const auto constants = derived_constants(validate_params(probe, init));
        if (!(params.h0 < constants.h0_crit)) {
            throw Error(ErrorCode::PreconditionViolated,
                        "h0 >= (pi/2) sqrt(d/mu): every beta spreads, there is no threshold to bracket");
        }
    }

    BetaBracket bracket;
    auto verdict_at = [&](double beta) {
        ModelParams p = params;
        p.beta = beta;
        auto c = classify_run(p, init, disc, options.criteria);
        ++bracket.runs;
        bracket.probes.push_back({beta, c});
        return c.verdict;
    };
    auto undecided = [](double beta) {
        return Error(ErrorCode::UndecidedProbe,
                     "bracket endpoint beta = " + std::to_string(beta) + " is Undecided; increase t_end");
    };

    double lo = lo0;
    double hi = hi0;
    Verdict v_lo = verdict_at(lo);
    if (v_lo == Verdict::Undecided) throw undecided(lo);
    if (v_lo == Verdict::Spreading) {
        int n = 0;
        while (v_lo == Verdict::Spreading) {
            hi = lo;
            if (++n > options.max_expansions) {
                throw Error(ErrorCode::NoBracket, "no Vanishing beta found down to " + std::to_string(lo));
            }
            lo /= options.expand_factor;
            v_lo = verdict_at(lo);
            if (v_lo == Verdict::Undecided) throw undecided(lo);
        }
    } else {
        Verdict v_hi = verdict_at(hi);
        int n = 0;
        while (v_hi != Verdict::Spreading) {
            if (v_hi == Verdict::Undecided) throw undecided(hi);
            if (++n > options.max_expansions) {
                throw Error(ErrorCode::NoBracket, "no Spreading beta found up to " + std::to_string(hi));
            }
            lo = hi;
            hi *= options.expand_factor;
            v_hi = verdict_at(hi);
        }
    }

    while (hi - lo > width_tol) {
        const double mid = 0.5 * (lo + hi);
        const Verdict v = verdict_at(mid);
        if (v == Verdict::Undecided) {
            bracket.undecided_beta = mid;
            break;
        }
        (v == Verdict::Spreading ? hi : lo) = mid;
    }
    bracket.lo = lo;
    bracket.hi = hi;
    return bracket;
}

namespace {

void set_axis(ModelParams& p, const std::string& name, double value) {
    if (name == "a") p.a = value;
    else if (name == "b") p.b = value;
    else if (name == "d") p.d = value;
    else if (name == "mu") p.mu = value;
    else if (name == "beta") p.beta = value;
    else if (name == "h0") p.h0 = value;
    else if (name == "m") std::get<HollingTanner>(p.kernel).m = value;
}

}  // namespace

GridTable run_grid(const std::vector<GridAxis>& axes_in, const ModelParams& base, const InitialData& init,
                   const Discretization& disc, const GridOptions& options) {
    static const std::set<std::string> known{"a", "b", "d", "mu", "beta", "h0", "m"};
    if (axes_in.empty()) throw Error(ErrorCode::PreconditionViolated, "at least one axis is required");
    std::vector<GridAxis> axes = axes_in;
    std::set<std::string> seen;
    std::size_t total = 1;
    for (auto& axis : axes) {
        if (!known.contains(axis.name)) throw Error(ErrorCode::PreconditionViolated, "unknown axis '" + axis.name + "'");
        if (!seen.insert(axis.name).second) throw Error(ErrorCode::PreconditionViolated, "duplicate axis '" + axis.name + "'");
        if (axis.name == "m" && !std::holds_alternative<HollingTanner>(base.kernel)) {
            throw Error(ErrorCode::PreconditionViolated, "axis 'm' needs the Holling-Tanner kernel");
        }
        if (axis.values.empty()) throw Error(ErrorCode::PreconditionViolated, "axis '" + axis.name + "' is empty");
        std::sort(axis.values.begin(), axis.values.end());
        axis.values.erase(std::unique(axis.values.begin(), axis.values.end()), axis.values.end());
        total *= axis.values.size();
        if (total > options.max_runs) {
            throw Error(ErrorCode::RunCapExceeded, "grid exceeds max_runs = " + std::to_string(options.max_runs));
        }
    }

    GridTable table;
    for (const auto& axis : axes) table.axis_names.push_back(axis.name);
    table.rows.resize(total);
    for (std::size_t r = 0; r < total; ++r) {
        auto& row = table.rows[r];
        row.params = base;
        row.coords.resize(axes.size());
        std::size_t rem = r;
        for (std::size_t k = axes.size(); k-- > 0;) {
            const auto& values = axes[k].values;
            row.coords[k] = values[rem % values.size()];
            rem /= values.size();
            set_axis(row.params, axes[k].name, row.coords[k]);
        }
    }

    auto run_row = [&](GridRow& row) {
        try {
            const auto model = validate_params(row.params, init);
            const auto constants = derived_constants(model);
            const auto run = simulate(model, disc);
            row.classification = classify(run.series, constants,
                                          resolve_criteria(options.criteria, constants, row.params),
                                          model.theory_valid);
            row.last = run.series.back();
            row.stop = run.health.stop;
            row.floor_hits = run.health.floor_hits;
        } catch (const Error& e) {
            row.error = e.what();
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(total)));
    if (workers == 1) {
        for (auto& row : table.rows) run_row(row);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < total; i = next++) run_row(table.rows[i]);
            });
        }
    }

    // Verdict monotonicity in beta along each line of fixed other coordinates.
    const auto beta_it = std::find(table.axis_names.begin(), table.axis_names.end(), "beta");
    if (beta_it != table.axis_names.end()) {
        const auto bk = static_cast<std::size_t>(beta_it - table.axis_names.begin());
        std::map<std::vector<double>, std::vector<const GridRow*>> lines;
        for (const auto& row : table.rows) {
            auto key = row.coords;
            key.erase(key.begin() + static_cast<std::ptrdiff_t>(bk));
            lines[key].push_back(&row);
        }
        for (const auto& [key, rows] : lines) {
            std::optional<double> spreading_at;
            for (const auto* row : rows) {
                if (!row->classification) continue;
                const auto v = row->classification->verdict;
                if (v == Verdict::Spreading && !spreading_at) spreading_at = row->coords[bk];
                if (v == Verdict::Vanishing && spreading_at) {
                    table.anomalies.push_back("Vanishing at beta = " + std::to_string(row->coords[bk]) +
                                              " after Spreading at beta = " + std::to_string(*spreading_at));
                }
            }
        }
    }
    return table;
}

}  // namespace lgfb
