#include "lgfb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lgfb/error.hpp"

namespace lgfb {

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Spreading: return "Spreading";
        case Verdict::Vanishing: return "Vanishing";
        case Verdict::Undecided: return "Undecided";
    }
    return "Undecided";
}

std::optional<Verdict> parse_verdict(std::string_view text) noexcept {
    if (text == "Spreading") return Verdict::Spreading;
    if (text == "Vanishing") return Verdict::Vanishing;
    if (text == "Undecided") return Verdict::Undecided;
    return std::nullopt;
}

Thresholds resolve_criteria(const ClassificationCriteria& criteria, const DerivedConstants& constants,
                            const ModelParams& params) {
    Thresholds t;
    t.eps_v = criteria.eps_v.value_or(1e-6 * constants.B);
    t.eps_speed = criteria.eps_speed.value_or(1e-6 * params.beta * constants.B / params.h0);
    t.tol_span = criteria.tol_span;
    if (!(t.eps_v > 0.0) || !(t.eps_speed > 0.0) || !(t.tol_span >= 0.0)) {
        throw Error(ErrorCode::ConstraintViolation, "classifier tolerances must be positive");
    }
    return t;
}

Classification classify(const Series& series, const DerivedConstants& constants, const Thresholds& thresholds,
                        bool theory_valid) {
    if (series.empty()) throw Error(ErrorCode::EmptySeries, "cannot classify an empty series");
    const double span_limit = constants.span_crit * (1.0 + thresholds.tol_span);
    auto evidence = [&](const SeriesRecord& r, Verdict v, std::string rule) {
        return Classification{v,
                              r.span,
                              r.max_v,
                              std::abs(r.gdot) + std::abs(r.hdot),
                              r.t,
                              std::move(rule),
                              theory_valid};
    };
    for (const auto& r : series) {
        if (r.span > span_limit) return evidence(r, Verdict::Spreading, "span > span_crit (1 + tol_span)");
        const double speed = std::abs(r.gdot) + std::abs(r.hdot);
        if (r.max_v < thresholds.eps_v && speed < thresholds.eps_speed) {
            return evidence(r, Verdict::Vanishing, "max_v < eps_v, speeds < eps_speed, span subcritical");
        }
    }
    return evidence(series.back(), Verdict::Undecided, "none");
}

double bound_lower_closed(double a, double b, int i) {
    // a sum_{k=0}^{2i-1} (-b)^k
    double sum = 0.0;
    double term = 1.0;
    for (int k = 0; k <= 2 * i - 1; ++k) {
        sum += term;
        term *= -b;
    }
    return a * sum;
}

double bound_upper_closed(double a, double b, int i) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 0; k <= 2 * i; ++k) {
        sum += term;
        term *= -b;
    }
    return a * sum;
}

BoundSequence bound_sequences(double a, double b, int i_max) {
    if (!(a > 0.0) || !(b > 0.0) || i_max < 1) {
        throw Error(ErrorCode::PreconditionViolated, "bound_sequences needs a > 0, b > 0, i_max >= 1");
    }
    if (b >= 1.0) throw Error(ErrorCode::AssumptionViolated, "bound sequences converge only for b < 1");
    BoundSequence seq;
    seq.limit = a / (1.0 + b);
    double lower = a - b * a;
    for (int i = 1; i <= i_max; ++i) {
        const double upper = a - b * lower;
        seq.lower.push_back(lower);
        seq.upper.push_back(upper);
        seq.closed_form_gap = std::max({seq.closed_form_gap, std::abs(lower - bound_lower_closed(a, b, i)),
                                        std::abs(upper - bound_upper_closed(a, b, i))});
        lower = a - b * upper;
    }
    return seq;
}

AsymptoticErrors asymptotic_check(const Solver& solver, const SimState& final_state,
                                  const Classification& verdict, double window) {
    const auto& p = solver.model().params;
    const auto& k = solver.constants();
    if (verdict.verdict == Verdict::Undecided) {
        throw Error(ErrorCode::PreconditionViolated, "asymptotic_check needs a Spreading or Vanishing verdict");
    }
    if (!(window > 0.0) || window > solver.disc().L) {
        throw Error(ErrorCode::PreconditionViolated, "window must lie in (0, L]");
    }
    AsymptoticErrors out;
    out.max_v = *std::max_element(final_state.z.begin(), final_state.z.end());
    const std::size_t n = final_state.u.size();
    if (verdict.verdict == Verdict::Spreading) {
        if (!(final_state.front.g < -window && window < final_state.front.h)) {
            throw Error(ErrorCode::WindowOutsideFronts, "[-W, W] is not inside (g, h)");
        }
        const double cu = k.coexistence_u;
        const double cv = k.coexistence_v;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = solver.x_at(j);
            if (std::abs(x) > window) continue;
            out.u_error = std::max(out.u_error, std::abs(final_state.u[j] - cu) / cu);
            out.v_error = std::max(out.v_error, std::abs(solver.predator_at(final_state, x) - cv) / cv);
        }
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(solver.x_at(j)) > window) continue;
            out.u_error = std::max(out.u_error, std::abs(final_state.u[j] - p.a) / p.a);
        }
        out.v_error = out.max_v / k.B;
    }
    return out;
}

double SupersolutionWitness::s(double t) const noexcept { return 1.0 + 2.0 * eps - eps * std::exp(-decay * t); }

double SupersolutionWitness::eta(double t) const noexcept { return h0 * s(t); }

double SupersolutionWitness::phi(double x) const noexcept {
    return std::sin(std::numbers::pi * (x + h0) / (2.0 * h0));
}

double SupersolutionWitness::value(double t, double x) const noexcept {
    const double st = s(t);
    if (std::abs(x) >= h0 * st) return 0.0;
    return K * std::exp(-decay * t) * phi(x / st);
}

double min_witness_amplitude(const ValidatedModel& model, double eps, int samples) {
    const double h0 = model.params.h0;
    const SupersolutionWitness unit{h0, eps, 0.0, 1.0};
    double k = 0.0;
    for (int i = 1; i + 1 < samples; ++i) {
        const double x = -h0 + 2.0 * h0 * i / (samples - 1);
        k = std::max(k, evaluate(model.init.v0, x, h0) / unit.phi(x / (1.0 + eps)));
    }
    return k * (1.0 + kWitnessScanMargin);
}

double witness_beta_limit(const SupersolutionWitness& w) noexcept {
    return 2.0 * w.h0 * w.h0 * w.eps * w.decay / (w.K * std::numbers::pi);
}

double witness_interior_margin(const SupersolutionWitness& w, const ModelParams& params) noexcept {
    const double lambda1 = params.d * std::numbers::pi * std::numbers::pi / (4.0 * w.h0 * w.h0);
    const double s_max = 1.0 + 2.0 * w.eps;
    return lambda1 / (s_max * s_max) - params.mu - w.decay;
}

DominationReport supersolution_check(const ValidatedModel& model, const Discretization& disc,
                                     const SupersolutionWitness& witness) {
    const auto& p = model.params;
    const auto constants = derived_constants(model);
    if (!(p.h0 < constants.h0_crit)) {
        throw Error(ErrorCode::PreconditionViolated, "supersolution needs h0 < (pi/2) sqrt(d/mu)");
    }
    if (!(witness.eps > 0.0 && witness.eps < 1.0) || !(witness.decay > 0.0 && witness.decay < 1.0) ||
        !(witness.K > 0.0) || witness.h0 != p.h0) {
        throw Error(ErrorCode::WitnessInvalid, "need 0 < eps, decay < 1, K > 0 and witness h0 = model h0");
    }
    DominationReport report;
    report.beta_limit = witness_beta_limit(witness);
    report.interior_margin = witness_interior_margin(witness, p);
    if (!(report.interior_margin > 0.0)) {
        throw Error(ErrorCode::WitnessInvalid, "eps/decay too large: witness is not a strict supersolution");
    }

    const double field_tol = 1e-12 * witness.K;
    const double front_tol = 1e-12 * p.h0;
    {
        // Initial domination on the predator grid actually used by the solver.
        const Solver probe(model, disc);
        const auto s0 = probe.initial_state();
        for (std::size_t i = 0; i < s0.z.size(); ++i) {
            const double x = p.h0 * probe.y_at(i);
            if (s0.z[i] > witness.value(0.0, x) + field_tol) {
                throw Error(ErrorCode::WitnessInvalid,
                            "K phi(x/(1+eps)) < v0(x) at x = " + std::to_string(x) + "; increase K");
            }
        }
    }

    report.min_field_margin = std::numeric_limits<double>::infinity();
    report.min_front_margin = std::numeric_limits<double>::infinity();
    const auto run = simulate(model, disc, [&](const Solver& solver, const SimState& s, const SeriesRecord&) {
        const double eta = witness.eta(s.t);
        const double front_margin = std::min(s.front.g + eta, eta - s.front.h);
        report.min_front_margin = std::min(report.min_front_margin, front_margin);
        if (front_margin < -front_tol) report.confined = false;
        for (std::size_t i = 1; i + 1 < s.z.size(); ++i) {
            const double x = map_y_to_x(solver.y_at(i), s.front);
            const double margin = witness.value(s.t, x) - s.z[i];
            report.min_field_margin = std::min(report.min_field_margin, margin);
            if (margin < -field_tol) report.dominated = false;
        }
        ++report.records_checked;
    });
    report.stop = run.health.stop;
    return report;
}

RunRecord run_record(const ValidatedModel& model, const Discretization& disc) {
    auto run = simulate(model, disc);
    return {model, resolve(disc, model.params), std::move(run.series), run.health.max_stencil_tolerance};
}

OrderingReport comparison_check(const RunRecord& small, const RunRecord& big) {
    if (!(small.model.params == big.model.params)) {
        throw Error(ErrorCode::IncomparableRuns, "runs differ in model parameters");
    }
    if (!(small.disc == big.disc)) throw Error(ErrorCode::IncomparableRuns, "runs differ in discretization");
    if (!(small.model.init.u0 == big.model.init.u0)) {
        throw Error(ErrorCode::IncomparableRuns, "runs differ in the prey initial profile");
    }
    const double h0 = small.model.params.h0;
    constexpr int kSamples = 2001;
    for (int i = 0; i <= kSamples; ++i) {
        const double x = -h0 + 2.0 * h0 * i / kSamples;
        if (evaluate(small.model.init.v0, x, h0) > evaluate(big.model.init.v0, x, h0)) {
            throw Error(ErrorCode::IncomparableRuns, "v0_small > v0_big at x = " + std::to_string(x));
        }
    }

    OrderingReport report;
    const double eps = std::max(small.stencil_tolerance, big.stencil_tolerance);
    const std::size_t n = std::min(small.series.size(), big.series.size());
    for (std::size_t k = 0; k < n; ++k) {
        const auto& a = small.series[k];
        const auto& b = big.series[k];
        if (a.t != b.t) break;
        const double violation = std::max({0.0, b.g - a.g, a.h - b.h});
        const double allowed = 2.0 * eps * a.t;
        report.max_violation = std::max(report.max_violation, violation);
        report.max_excess = std::max(report.max_excess, violation - allowed);
        if (violation > allowed) report.nested = false;
        ++report.records_compared;
    }
    return report;
}

}  // namespace lgfb
