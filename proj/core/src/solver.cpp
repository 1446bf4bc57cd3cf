#include "lgfb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lgfb/error.hpp"

namespace lgfb {

namespace {

double trapezoid(std::span<const double> f, double h) {
    if (f.size() < 2) return 0.0;
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
    return sum * h;
}

std::string num(double v) { return std::to_string(v); }

}  // namespace

Discretization resolve(const Discretization& disc, const ModelParams& params) {
    Discretization out = disc;
    std::vector<Violation> violations;
    auto fail = [&](const char* field, const std::string& msg) {
        violations.push_back({ErrorCode::InvalidDiscretization, field, msg});
    };
    if (!(disc.L > 0.0)) fail("L", "must be > 0");
    if (disc.ny < 8) fail("ny", "must be >= 8");
    if (!out.nx) out.nx = static_cast<int>(std::ceil(disc.L * disc.ny / 2.0));
    if (*out.nx < 8) fail("nx", "must be >= 8");
    if (!(disc.dt > 0.0)) fail("dt", "must be > 0");
    if (!(disc.t_end >= 0.0)) fail("t_end", "must be >= 0");
    if (!(disc.cfl_safety > 0.0 && disc.cfl_safety <= 1.0)) fail("cfl_safety", "must lie in (0, 1]");
    if (!out.u_floor) out.u_floor = 1e-8 * params.a;
    if (!(*out.u_floor > 0.0)) fail("u_floor", "must be > 0");
    if (!(disc.front_margin >= 0.0)) fail("front_margin", "must be >= 0");
    if (!(disc.record_every > 0.0)) fail("record_every", "must be > 0");
    if (!(disc.report_window > 0.0 && disc.report_window <= disc.L)) fail("report_window", "must lie in (0, L]");
    if (disc.L > 0.0 && disc.front_margin >= 0.0 && !(disc.L > params.h0 + disc.front_margin)) {
        throw Error(ErrorCode::DomainTooSmall, "L = " + num(disc.L) + " must exceed h0 + front_margin = " +
                                                   num(params.h0 + disc.front_margin));
    }
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return out;
}

Solver::Solver(ValidatedModel model, const Discretization& disc)
    : model_(std::move(model)),
      disc_(resolve(disc, model_.params)),
      constants_(derived_constants(model_)) {
    nx_ = static_cast<std::size_t>(*disc_.nx);
    ny_ = static_cast<std::size_t>(disc_.ny);
    dx_ = 2.0 * disc_.L / static_cast<double>(nx_);
    dy_ = 2.0 / static_cast<double>(ny_);
    u_floor_ = *disc_.u_floor;
    u_next_.resize(nx_ + 1);
    v_on_prey_.resize(nx_ + 1);
    z_next_.resize(ny_ + 1);
    w_on_pred_.resize(ny_ + 1);
    pred_lower_.resize(ny_ - 1);
    pred_diag_.resize(ny_ - 1);
    pred_upper_.resize(ny_ - 1);
}

SimState Solver::initial_state() const {
    const auto& p = model_.params;
    SimState s;
    s.u.resize(nx_ + 1);
    for (std::size_t j = 0; j <= nx_; ++j) s.u[j] = evaluate(model_.init.u0, x_at(j));
    s.z.resize(ny_ + 1);
    for (std::size_t i = 0; i <= ny_; ++i) s.z[i] = evaluate(model_.init.v0, p.h0 * y_at(i), p.h0);
    s.z.front() = 0.0;
    s.z.back() = 0.0;
    s.front = {-p.h0, p.h0, model_.gstar, model_.hstar};
    return s;
}

FrontSpeeds Solver::speeds(const SimState& s) const {
    return front_speeds(s.z, dy_, s.front, model_.params.beta);
}

double Solver::cfl_limit(const SimState& s) const {
    const auto sp = speeds(s);
    const double zmax = coeffs({s.front.g, s.front.h, sp.gdot, sp.hdot}).max_abs_zeta();
    if (zmax == 0.0) return std::numeric_limits<double>::infinity();
    return disc_.cfl_safety * dy_ / zmax;
}

double Solver::prey_at(const SimState& s, double x) const {
    const double pos = (x + disc_.L) / dx_;
    if (pos <= 0.0) return s.u.front();
    if (pos >= static_cast<double>(nx_)) return s.u.back();
    const auto j = std::min(static_cast<std::size_t>(pos), nx_ - 1);
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * s.u[j] + w * s.u[j + 1];
}

double Solver::predator_at(const SimState& s, double x) const {
    if (x <= s.front.g || x >= s.front.h) return 0.0;
    const double pos = (map_x_to_y(x, s.front) + 1.0) / dy_;
    const auto i = std::min(static_cast<std::size_t>(std::max(pos, 0.0)), ny_ - 1);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * s.z[i] + w * s.z[i + 1];
}

std::vector<double> Solver::predator_on_prey_grid(const SimState& s) const {
    std::vector<double> v(nx_ + 1);
    for (std::size_t j = 0; j <= nx_; ++j) v[j] = predator_at(s, x_at(j));
    return v;
}

void Solver::prepare_prey_matrix(double dt) {
    if (dt == prey_dt_) return;
    const double r = dt / (dx_ * dx_);
    prey_lower_.assign(nx_ + 1, -r);
    prey_diag_.assign(nx_ + 1, 1.0 + 2.0 * r);
    prey_upper_.assign(nx_ + 1, -r);
    // Neumann ends via mirrored ghost nodes.
    prey_upper_.front() = -2.0 * r;
    prey_lower_.back() = -2.0 * r;
    prey_dt_ = dt;
}

void Solver::advance(SimState& s, double dt) {
    const auto& p = model_.params;
    const FrontState f0 = s.front;
    const double span0 = f0.span();

    const FrontSpeeds sp0 = front_speeds(s.z, dy_, f0, p.beta);
    const TransformCoeffs c0 = coeffs({f0.g, f0.h, sp0.gdot, sp0.hdot});
    if (dt * c0.max_abs_zeta() > disc_.cfl_safety * dy_ * (1.0 + 1e-12)) {
        throw Error(ErrorCode::CflViolation, "dt = " + num(dt) + " exceeds cfl_safety dy / max|zeta| = " +
                                                 num(disc_.cfl_safety * dy_ / c0.max_abs_zeta()));
    }

    // Coupling fields at the old time level.
    for (std::size_t i = 0; i <= ny_; ++i) w_on_pred_[i] = prey_at(s, 0.5 * (span0 * y_at(i) + f0.h + f0.g));
    std::fill(v_on_prey_.begin(), v_on_prey_.end(), 0.0);
    {
        const double lo = (f0.g + disc_.L) / dx_;
        const double hi = (f0.h + disc_.L) / dx_;
        const auto jlo = static_cast<std::size_t>(std::max(0.0, std::floor(lo) + 1.0));
        const auto jhi = static_cast<std::size_t>(std::min(static_cast<double>(nx_), std::ceil(hi) - 1.0));
        for (std::size_t j = jlo; j <= jhi; ++j) v_on_prey_[j] = predator_at(s, x_at(j));
    }

    // Prey: implicit diffusion, explicit reaction.
    prepare_prey_matrix(dt);
    for (std::size_t j = 0; j <= nx_; ++j) {
        u_next_[j] = s.u[j] + dt * reaction_rates(s.u[j], v_on_prey_[j], p, u_floor_).prey;
    }
    thomas_.solve(prey_lower_, prey_diag_, prey_upper_, u_next_);

    // Predator: explicit advection + reaction, then implicit diffusion on the
    // predicted geometry.
    long long hits = 0;
    double reaction_integral = 0.0;
    z_next_.front() = 0.0;
    z_next_.back() = 0.0;
    for (std::size_t i = 1; i < ny_; ++i) {
        const double adv = c0.zeta(y_at(i)) * (s.z[i + 1] - s.z[i - 1]) / (2.0 * dy_);
        const auto r = reaction_rates(w_on_pred_[i], s.z[i], p, u_floor_);
        if (r.floored) ++hits;
        reaction_integral += r.predator;
        z_next_[i] = s.z[i] + dt * (adv + r.predator);
    }
    reaction_integral *= 0.5 * span0 * dy_;  // end samples of the reaction vanish

    const FrontState predicted{f0.g + dt * sp0.gdot, f0.h + dt * sp0.hdot, sp0.gdot, sp0.hdot};
    const double span_p = predicted.span();
    if (!(span_p > 0.0)) throw Error(ErrorCode::DegenerateInterval, "predicted span collapsed");
    const double k = dt * p.d * (4.0 / (span_p * span_p)) / (dy_ * dy_);
    std::fill(pred_lower_.begin(), pred_lower_.end(), -k);
    std::fill(pred_diag_.begin(), pred_diag_.end(), 1.0 + 2.0 * k);
    std::fill(pred_upper_.begin(), pred_upper_.end(), -k);
    thomas_.solve(pred_lower_, pred_diag_, pred_upper_, std::span<double>(z_next_).subspan(1, ny_ - 1));

    // Heun corrector for the fronts.
    const FrontSpeeds sp1 = front_speeds(z_next_, dy_, predicted, p.beta);
    FrontState f1{f0.g + 0.5 * dt * (sp0.gdot + sp1.gdot), f0.h + 0.5 * dt * (sp0.hdot + sp1.hdot), 0.0, 0.0};
    if (!(f1.span() > 0.0)) throw Error(ErrorCode::DegenerateInterval, "front span collapsed");

    // Health checks before committing.
    double max_u = 0.0;
    double min_u = std::numeric_limits<double>::infinity();
    for (double u : u_next_) {
        max_u = std::max(max_u, u);
        min_u = std::min(min_u, u);
    }
    double max_z = 0.0;
    double min_z = std::numeric_limits<double>::infinity();
    double max_z_old = 0.0;
    for (std::size_t i = 0; i <= ny_; ++i) {
        max_z = std::max(max_z, z_next_[i]);
        min_z = std::min(min_z, z_next_[i]);
        max_z_old = std::max(max_z_old, s.z[i]);
    }
    const double u_cap = constants_.A * (1.0 + kBoundTolerance);
    const double z_cap = constants_.B * (1.0 + kBoundTolerance);
    if (!(min_u >= 0.0) || !(max_u <= u_cap)) {
        throw Error(ErrorCode::BoundBlowup, "prey left [0, A(1+tol)] at t = " + num(s.t + dt) + ": min " +
                                                num(min_u) + ", max " + num(max_u));
    }
    if (!(min_z >= 0.0) || !(max_z <= z_cap)) {
        throw Error(ErrorCode::BoundBlowup, "predator left [0, B(1+tol)] at t = " + num(s.t + dt) + ": min " +
                                                num(min_z) + ", max " + num(max_z));
    }

    const double eps = stencil_tolerance(std::max(max_z, max_z_old), dy_, std::min(span0, f1.span()), p.beta);
    const double backstep = std::max({0.0, f1.g - f0.g, f0.h - f1.h});
    if (backstep > dt * eps) {
        throw Error(ErrorCode::NonmonotoneFronts,
                    "front moved inward by " + num(backstep) + " > dt eps_stencil = " + num(dt * eps));
    }
    if (f1.h > disc_.L - disc_.front_margin || f1.g < -disc_.L + disc_.front_margin) {
        throw Error(ErrorCode::FrontNearTruncation,
                    "front within front_margin of +-L at t = " + num(s.t + dt) + " (g=" + num(f1.g) +
                        ", h=" + num(f1.h) + ")");
    }

    const FrontSpeeds sp_new = front_speeds(z_next_, dy_, f1, p.beta);
    f1.gdot = sp_new.gdot;
    f1.hdot = sp_new.hdot;

    diag_.stencil_tolerance = eps;
    diag_.backstep = backstep;
    diag_.max_u = max_u;
    diag_.max_z = max_z;
    diag_.mass_before = 0.5 * span0 * trapezoid(s.z, dy_);
    diag_.mass_source = dt * (reaction_integral - (p.d / p.beta) * (sp0.hdot - sp0.gdot));

    s.u.swap(u_next_);
    s.z.swap(z_next_);
    s.front = f1;
    s.t += dt;
    s.floor_hits += hits;
    ++s.step_count;
}

SeriesRecord Solver::record(const SimState& s) const {
    SeriesRecord r;
    r.t = s.t;
    r.g = s.front.g;
    r.h = s.front.h;
    r.gdot = s.front.gdot;
    r.hdot = s.front.hdot;
    r.span = s.front.span();
    r.max_v = *std::max_element(s.z.begin(), s.z.end());
    r.max_u = *std::max_element(s.u.begin(), s.u.end());
    double core = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j <= nx_; ++j) {
        if (std::abs(x_at(j)) <= disc_.report_window) core = std::min(core, s.u[j]);
    }
    r.min_u_core = core;
    r.floor_hits = s.floor_hits;
    return r;
}

SimState init_state(const ValidatedModel& model, const Discretization& disc) {
    return Solver(model, disc).initial_state();
}

SimState step(const SimState& state, const ValidatedModel& model, const Discretization& disc) {
    Solver solver(model, disc);
    SimState next = state;
    solver.advance(next, solver.disc().dt);
    return next;
}

SimulationResult simulate(const ValidatedModel& model, const Discretization& disc, const RecordObserver& observer) {
    Solver solver(model, disc);
    const auto& d = solver.disc();
    const auto& k = solver.constants();

    SimulationResult result;
    auto& health = result.health;
    SimState state = solver.initial_state();
    health.min_dt = std::numeric_limits<double>::infinity();

    auto push_record = [&](const SimState& s) {
        const auto rec = solver.record(s);
        health.max_u_ratio = std::max(health.max_u_ratio, rec.max_u / k.A);
        health.max_v_ratio = std::max(health.max_v_ratio, rec.max_v / k.B);
        health.min_core_u = result.series.empty() ? rec.min_u_core : std::min(health.min_core_u, rec.min_u_core);
        result.series.push_back(rec);
        if (observer) observer(solver, s, rec);
    };
    auto mass = [&](const SimState& s) {
        return 0.5 * s.front.span() * trapezoid(s.z, solver.dy());
    };

    push_record(state);
    const double mass0 = mass(state);
    double mass_scale = mass0;
    double source_total = 0.0;

    long long next_index = 1;
    while (state.t < d.t_end) {
        const double target = std::min(static_cast<double>(next_index) * d.record_every, d.t_end);
        const double remaining = target - state.t;
        // Equal steps up to the next record time, each no larger than the CFL limit.
        const double dt_max = std::min(d.dt, solver.cfl_limit(state));
        const double n_steps = std::max(1.0, std::ceil(remaining / dt_max * (1.0 - 1e-12)));
        const bool lands = n_steps == 1.0;
        const double dt = lands ? remaining : remaining / n_steps;
        try {
            solver.advance(state, dt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::FrontNearTruncation) throw;
            health.stop = StopReason::FrontNearTruncation;
            break;
        }
        if (lands) state.t = target;
        const auto& sd = solver.last_step();
        ++health.steps;
        health.min_dt = std::min(health.min_dt, dt);
        health.max_stencil_tolerance = std::max(health.max_stencil_tolerance, sd.stencil_tolerance);
        if (sd.backstep > 0.0) {
            ++health.tolerated_backsteps;
            health.max_backstep = std::max(health.max_backstep, sd.backstep);
        }
        source_total += sd.mass_source;
        mass_scale = std::max({mass_scale, sd.mass_before, std::abs(source_total)});
        if (lands) {
            push_record(state);
            if (target >= static_cast<double>(next_index) * d.record_every) ++next_index;
        }
    }
    if (result.series.back().t != state.t) push_record(state);

    health.floor_hits = state.floor_hits;
    if (health.steps == 0) health.min_dt = 0.0;
    health.stefan_balance_residual =
        mass_scale > 0.0 ? std::abs(mass(state) - mass0 - source_total) / mass_scale : 0.0;
    result.final_state = std::move(state);
    return result;
}

namespace {

std::optional<double> observed_order(double coarse, double mid, double fine) {
    const double e1 = std::abs(coarse - mid);
    const double e2 = std::abs(mid - fine);
    if (!(e1 > 0.0) || !(e2 > 0.0)) return std::nullopt;
    const double p = std::log2(e1 / e2);
    if (!std::isfinite(p)) return std::nullopt;
    return p;
}

}  // namespace

RefinementReport refine_check(const ValidatedModel& model, std::span<const Discretization> discs,
                              double t_compare) {
    if (discs.size() < 3) throw Error(ErrorCode::PreconditionViolated, "refine_check needs at least 3 levels");
    if (!(t_compare >= 0.0)) throw Error(ErrorCode::PreconditionViolated, "t_compare must be >= 0");
    RefinementReport report;
    report.t_compare = t_compare;
    for (const auto& base : discs) {
        Discretization d = base;
        d.t_end = t_compare;
        d.record_every = std::max(t_compare, d.record_every);
        const auto run = simulate(model, d);
        if (run.health.stop != StopReason::Completed) {
            throw Error(ErrorCode::FrontNearTruncation,
                        "refinement run stopped at t = " + num(run.final_state.t) + " before t_compare");
        }
        const auto& f = run.final_state.front;
        report.levels.push_back({resolve(d, model.params), f.g, f.h, f.span()});
    }
    for (std::size_t i = 0; i + 2 < report.levels.size(); ++i) {
        const auto& a = report.levels[i];
        const auto& b = report.levels[i + 1];
        const auto& c = report.levels[i + 2];
        ObservedOrder o{observed_order(a.g, b.g, c.g), observed_order(a.h, b.h, c.h),
                        observed_order(a.span, b.span, c.span)};
        if (!o.g || !o.h || !o.span) report.undefined = true;
        report.orders.push_back(o);
    }
    return report;
}

RefinementReport refine_check(const ValidatedModel& model, const Discretization& base, int levels,
                              double t_compare) {
    if (levels < 3) throw Error(ErrorCode::PreconditionViolated, "refine_check needs levels >= 3");
    Discretization d = resolve(base, model.params);
    std::vector<Discretization> discs;
    for (int k = 0; k < levels; ++k) {
        discs.push_back(d);
        d.dt *= 0.5;
        d.ny *= 2;
        *d.nx *= 2;
    }
    return refine_check(model, discs, t_compare);
}

}  // namespace lgfb
