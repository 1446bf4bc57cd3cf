#include "lgfb/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lgfb/error.hpp"

namespace lgfb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double table_value(const TableProfile& t, double x) {
    const auto& xs = t.x;
    const auto& ys = t.values;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto i = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return (1.0 - w) * ys[i - 1] + w * ys[i];
}

// Derivative at x0 of the quadratic through (x0,f0), (x1,f1), (x2,f2).
double lagrange_slope(double x0, double x1, double x2, double f0, double f1, double f2) {
    return f0 * (2.0 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
           f1 * (x0 - x2) / ((x1 - x0) * (x1 - x2)) +
           f2 * (x0 - x1) / ((x2 - x0) * (x2 - x1));
}

void check_table_shape(const TableProfile& t, const std::string& field, std::vector<Violation>& out) {
    if (t.x.size() != t.values.size()) {
        out.push_back({ErrorCode::InitialProfileViolation, field, "x and values differ in length"});
        return;
    }
    if (t.x.size() < 3) {
        out.push_back({ErrorCode::InitialProfileViolation, field, "table needs at least 3 nodes"});
        return;
    }
    for (std::size_t i = 1; i < t.x.size(); ++i) {
        if (!(t.x[i] > t.x[i - 1])) {
            out.push_back({ErrorCode::InitialProfileViolation, field, "x must be strictly increasing"});
            return;
        }
    }
}

}  // namespace

double evaluate(const PreyProfile& profile, double x) {
    return std::visit(overloaded{
                          [](const ConstantProfile& c) { return c.value; },
                          [x](const TableProfile& t) { return table_value(t, x); },
                      },
                      profile);
}

double evaluate(const PredatorProfile& profile, double x, double h0) {
    if (x <= -h0 || x >= h0) return 0.0;
    return std::visit(overloaded{
                          [&](const CosineProfile& c) {
                              return c.amplitude * std::cos(std::numbers::pi * x / (2.0 * h0));
                          },
                          [x](const TableProfile& t) { return table_value(t, x); },
                      },
                      profile);
}

double max_value(const PreyProfile& profile) {
    return std::visit(overloaded{
                          [](const ConstantProfile& c) { return c.value; },
                          [](const TableProfile& t) {
                              return *std::max_element(t.values.begin(), t.values.end());
                          },
                      },
                      profile);
}

double max_value(const PredatorProfile& profile) {
    return std::visit(overloaded{
                          [](const CosineProfile& c) { return c.amplitude; },
                          [](const TableProfile& t) {
                              return *std::max_element(t.values.begin(), t.values.end());
                          },
                      },
                      profile);
}

EndpointSlopes endpoint_slopes(const PredatorProfile& profile, double h0) {
    return std::visit(
        overloaded{
            [h0](const CosineProfile& c) {
                // v0'(x) = -(pi/(2 h0)) V sin(pi x/(2 h0))
                const double k = std::numbers::pi / (2.0 * h0);
                return EndpointSlopes{c.amplitude * k, -c.amplitude * k};
            },
            [](const TableProfile& t) {
                const auto& x = t.x;
                const auto& f = t.values;
                const std::size_t n = x.size();
                return EndpointSlopes{
                    lagrange_slope(x[0], x[1], x[2], f[0], f[1], f[2]),
                    lagrange_slope(x[n - 1], x[n - 2], x[n - 3], f[n - 1], f[n - 2], f[n - 3])};
            },
        },
        profile);
}

ValidatedModel validate_params(const ModelParams& params, const InitialData& init) {
    std::vector<Violation> violations;
    auto positive = [&](double value, const char* name) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            violations.push_back({ErrorCode::NonPositiveParameter, name,
                                  "must be finite and > 0, got " + std::to_string(value)});
        }
    };
    positive(params.a, "a");
    positive(params.b, "b");
    positive(params.d, "d");
    positive(params.mu, "mu");
    positive(params.beta, "beta");
    positive(params.h0, "h0");
    if (const auto* ht = std::get_if<HollingTanner>(&params.kernel)) positive(ht->m, "m");

    std::visit(overloaded{
                   [&](const ConstantProfile& c) {
                       if (!(c.value > 0.0)) {
                           violations.push_back({ErrorCode::InitialProfileViolation, "u0",
                                                 "prey initial density must be > 0"});
                       }
                   },
                   [&](const TableProfile& t) {
                       const std::size_t before = violations.size();
                       check_table_shape(t, "u0", violations);
                       if (violations.size() != before) return;
                       if (*std::min_element(t.values.begin(), t.values.end()) <= 0.0) {
                           violations.push_back({ErrorCode::InitialProfileViolation, "u0",
                                                 "prey initial density must be > 0 at every node"});
                       }
                   },
               },
               init.u0);

    std::visit(overloaded{
                   [&](const CosineProfile& c) {
                       if (!(c.amplitude > 0.0)) {
                           violations.push_back({ErrorCode::InitialProfileViolation, "v0",
                                                 "cosine amplitude must be > 0"});
                       }
                   },
                   [&](const TableProfile& t) {
                       const std::size_t before = violations.size();
                       check_table_shape(t, "v0", violations);
                       if (violations.size() != before || !(params.h0 > 0.0)) return;
                       const double tol = 1e-12 * params.h0;
                       if (std::abs(t.x.front() + params.h0) > tol || std::abs(t.x.back() - params.h0) > tol) {
                           violations.push_back({ErrorCode::InitialProfileViolation, "v0",
                                                 "table must span exactly [-h0, h0]"});
                       }
                       const double vmax = *std::max_element(t.values.begin(), t.values.end());
                       const double zero_tol = 1e-12 * std::max(1.0, std::abs(vmax));
                       if (std::abs(t.values.front()) > zero_tol || std::abs(t.values.back()) > zero_tol) {
                           violations.push_back({ErrorCode::InitialProfileViolation, "v0",
                                                 "v0(+-h0) must be 0"});
                       }
                       for (std::size_t i = 1; i + 1 < t.values.size(); ++i) {
                           if (!(t.values[i] > 0.0)) {
                               violations.push_back({ErrorCode::InitialProfileViolation, "v0",
                                                     "v0 must be > 0 inside (-h0, h0)"});
                               break;
                           }
                       }
                   },
               },
               init.v0);

    if (!violations.empty()) throw ValidationError(std::move(violations));

    ValidatedModel model{params, init, 0.0, 0.0, params.b < 1.0, {}};
    const auto slopes = endpoint_slopes(init.v0, params.h0);
    model.gstar = -params.beta * slopes.left;
    model.hstar = -params.beta * slopes.right;
    if (!model.theory_valid) {
        model.warnings.push_back("b >= 1: spreading/vanishing classification is outside the proven regime (b < 1)");
    }
    if (model.gstar > 0.0 || model.hstar < 0.0) {
        throw ValidationError({{ErrorCode::InitialProfileViolation, "v0",
                                "endpoint slopes give g* > 0 or h* < 0"}});
    }
    return model;
}

ReactionRates reaction_rates(double u, double v, const ModelParams& params, double u_floor) noexcept {
    ReactionRates r;
    const double predation = std::visit(overloaded{
                                            [&](const LeslieGower&) { return params.b * u * v; },
                                            [&](const HollingTanner& ht) { return params.b * u * v / (ht.m + u); },
                                        },
                                        params.kernel);
    r.prey = u * (params.a - u) - predation;
    double capacity = u;
    if (u < u_floor) {
        capacity = u_floor;
        r.floored = true;
    }
    r.predator = params.mu * v * (1.0 - v / capacity);
    return r;
}

double coexistence_level(const ModelParams& params) {
    return std::visit(
        overloaded{
            [&](const LeslieGower&) { return params.a / (1.0 + params.b); },
            [&](const HollingTanner& ht) {
                // v = u and (a - u)(m + u) = b u  <=>  u^2 + (m + b - a) u - a m = 0
                const double q = ht.m + params.b - params.a;
                const double c = params.a * ht.m;
                const double disc = q * q + 4.0 * c;
                if (!(disc >= 0.0)) {
                    throw Error(ErrorCode::NoPositiveEquilibrium, "coexistence quadratic has no real root");
                }
                const double s = std::sqrt(disc);
                const double root = q > 0.0 ? 2.0 * c / (q + s) : 0.5 * (s - q);
                if (!(root > 0.0)) {
                    throw Error(ErrorCode::NoPositiveEquilibrium, "coexistence quadratic has no positive root");
                }
                return root;
            },
        },
        params.kernel);
}

DerivedConstants derived_constants(const ValidatedModel& model) {
    const auto& p = model.params;
    DerivedConstants c;
    c.h0_crit = 0.5 * std::numbers::pi * std::sqrt(p.d / p.mu);
    c.span_crit = 2.0 * c.h0_crit;
    c.lambda1 = p.d * std::numbers::pi * std::numbers::pi / (4.0 * p.h0 * p.h0);
    c.A = std::max(p.a, max_value(model.init.u0));
    c.B = std::max(c.A, max_value(model.init.v0));
    c.coexistence_u = coexistence_level(p);
    c.coexistence_v = c.coexistence_u;
    return c;
}

}  // namespace lgfb
