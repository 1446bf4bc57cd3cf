#pragma once

#include <string>
#include <variant>
#include <vector>

namespace lgfb {

/// Predation term b·u·v (Leslie-Gower).
struct LeslieGower {
    bool operator==(const LeslieGower&) const = default;
};

/// Predation term b·u·v/(m+u) with saturation constant m.
struct HollingTanner {
    double m = 1.0;
    bool operator==(const HollingTanner&) const = default;
};

using ReactionKernel = std::variant<LeslieGower, HollingTanner>;

struct ModelParams {
    double a = 1.0;     ///< prey growth rate
    double b = 0.5;     ///< predation coefficient
    double d = 1.0;     ///< predator diffusivity (prey diffusivity is 1)
    double mu = 1.0;    ///< predator growth rate
    double beta = 1.0;  ///< front-response coefficient of the Stefan law
    double h0 = 1.0;    ///< initial half-length of the predator habitat
    ReactionKernel kernel = LeslieGower{};

    bool operator==(const ModelParams&) const = default;
};

// Initial profiles. The prey lives on the whole (truncated) line, the predator
// on [-h0, h0] and is extended by zero outside.

struct ConstantProfile {
    double value = 1.0;
    bool operator==(const ConstantProfile&) const = default;
};

/// amplitude · cos(pi x / (2 h0)) on [-h0, h0].
struct CosineProfile {
    double amplitude = 1.0;
    bool operator==(const CosineProfile&) const = default;
};

/// Piecewise-linear table. `source` names the file it was read from, empty
/// when given inline.
struct TableProfile {
    std::vector<double> x;
    std::vector<double> values;
    std::string source;
    bool operator==(const TableProfile&) const = default;
};

using PreyProfile = std::variant<ConstantProfile, TableProfile>;
using PredatorProfile = std::variant<CosineProfile, TableProfile>;

struct InitialData {
    PreyProfile u0 = ConstantProfile{};
    PredatorProfile v0 = CosineProfile{};
    bool operator==(const InitialData&) const = default;
};

/// Prey profile value; tables are extended by their end values.
double evaluate(const PreyProfile& profile, double x);
/// Predator profile value; zero outside [-h0, h0].
double evaluate(const PredatorProfile& profile, double x, double h0);
double max_value(const PreyProfile& profile);
double max_value(const PredatorProfile& profile);

/// v0'(-h0) and v0'(h0). Exact for the cosine profile, second-order one-sided
/// differences for tables.
struct EndpointSlopes {
    double left = 0.0;
    double right = 0.0;
};
EndpointSlopes endpoint_slopes(const PredatorProfile& profile, double h0);

/// A parameter set that passed validation, with the initial front speeds
/// g* = -beta v0'(-h0) and h* = -beta v0'(h0).
struct ValidatedModel {
    ModelParams params;
    InitialData init;
    double gstar = 0.0;
    double hstar = 0.0;
    /// b < 1; the long-time theory (dichotomy, limits, span bound) assumes it.
    bool theory_valid = true;
    std::vector<std::string> warnings;
};

/// Throws ValidationError listing every violated constraint.
ValidatedModel validate_params(const ModelParams& params, const InitialData& init);

struct ReactionRates {
    double prey = 0.0;
    double predator = 0.0;
    bool floored = false;  ///< the predator term used u_floor instead of u
};

ReactionRates reaction_rates(double u, double v, const ModelParams& params, double u_floor) noexcept;

/// Positive spatially homogeneous coexistence state (u = v). Throws
/// NoPositiveEquilibrium when none exists.
double coexistence_level(const ModelParams& params);

struct DerivedConstants {
    double span_crit = 0.0;  ///< pi sqrt(d/mu)
    double h0_crit = 0.0;    ///< (pi/2) sqrt(d/mu)
    double lambda1 = 0.0;    ///< d pi^2 / (4 h0^2)
    double A = 0.0;          ///< sup bound for u
    double B = 0.0;          ///< sup bound for v
    double coexistence_u = 0.0;
    double coexistence_v = 0.0;
};

DerivedConstants derived_constants(const ValidatedModel& model);

}  // namespace lgfb
