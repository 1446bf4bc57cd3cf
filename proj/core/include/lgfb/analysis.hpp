#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lgfb/model.hpp"
#include "lgfb/solver.hpp"

namespace lgfb {

enum class Verdict { Spreading, Vanishing, Undecided };

std::string_view to_string(Verdict v) noexcept;
std::optional<Verdict> parse_verdict(std::string_view text) noexcept;

/// Classifier tolerances as configured; unset fields take their defaults
/// eps_v = 1e-6 B and eps_speed = 1e-6 beta B / h0.
struct ClassificationCriteria {
    std::optional<double> eps_v;
    std::optional<double> eps_speed;
    double tol_span = 0.02;

    bool operator==(const ClassificationCriteria&) const = default;
};

struct Thresholds {
    double eps_v = 0.0;
    double eps_speed = 0.0;
    double tol_span = 0.0;
};

Thresholds resolve_criteria(const ClassificationCriteria& criteria, const DerivedConstants& constants,
                            const ModelParams& params);

struct Classification {
    Verdict verdict = Verdict::Undecided;
    double span = 0.0;   ///< at decision time (last record when undecided)
    double max_v = 0.0;
    double speed = 0.0;  ///< |gdot| + |hdot|
    double time = 0.0;
    std::string rule;
    bool theory_valid = true;
};

/// Finite-time proxy for the spreading/vanishing alternative. The earliest
/// record where a rule fires decides:
///  - Spreading: span > span_crit (1 + tol_span);
///  - Vanishing: max_v < eps_v, span <= span_crit (1 + tol_span) and
///    |gdot| + |hdot| < eps_speed.
Classification classify(const Series& series, const DerivedConstants& constants, const Thresholds& thresholds,
                        bool theory_valid = true);

/// Iterated bounds on the long-time limits of u and v under spreading.
struct BoundSequence {
    std::vector<double> lower;  ///< underline a_i, i = 1..i_max
    std::vector<double> upper;  ///< overline a_i
    double limit = 0.0;         ///< a / (1 + b)
    /// Largest |recursion - closed form| over all terms.
    double closed_form_gap = 0.0;
};

/// Closed forms: lower_i = a (1 - b + ... - b^(2i-1)), upper_i = a (1 - b + ... + b^(2i)).
double bound_lower_closed(double a, double b, int i);
double bound_upper_closed(double a, double b, int i);

BoundSequence bound_sequences(double a, double b, int i_max);

struct AsymptoticErrors {
    double u_error = 0.0;  ///< relative sup-error of u on [-W, W]
    double v_error = 0.0;  ///< relative sup-error of v on [-W, W] (spreading) or max_v / B (vanishing)
    double max_v = 0.0;
};

/// Compares the final state with the long-time target of the verdict:
/// (c, c) with c the coexistence level for Spreading, (a, 0) for Vanishing.
AsymptoticErrors asymptotic_check(const Solver& solver, const SimState& final_state,
                                  const Classification& verdict, double window);

/// Moving-domain supersolution K e^{-decay t} phi(x / s(t)) on |x| < eta(t),
/// s(t) = 1 + 2 eps - eps e^{-decay t}, eta = h0 s, phi(x) = sin(pi (x + h0) / (2 h0)).
struct SupersolutionWitness {
    double h0 = 1.0;
    double eps = 0.05;
    double decay = 0.05;
    double K = 1.0;

    [[nodiscard]] double s(double t) const noexcept;
    [[nodiscard]] double eta(double t) const noexcept;
    [[nodiscard]] double phi(double x) const noexcept;
    [[nodiscard]] double value(double t, double x) const noexcept;
};

/// Relative margin added to the scanned amplitude to cover points between samples.
inline constexpr double kWitnessScanMargin = 1e-6;

/// Smallest K with K phi(x / (1 + eps)) >= v0(x) on [-h0, h0], from a scan
/// over `samples` equally spaced points (endpoints included), times
/// 1 + kWitnessScanMargin.
double min_witness_amplitude(const ValidatedModel& model, double eps, int samples = 20001);

/// Largest beta for which the witness fronts move at least as fast as the
/// Stefan law demands: 2 h0^2 eps decay / (K pi).
double witness_beta_limit(const SupersolutionWitness& witness) noexcept;

/// lambda1 / (1 + 2 eps)^2 - mu - decay; the witness is a strict
/// supersolution of v_t - d v_xx = mu v when this is positive.
double witness_interior_margin(const SupersolutionWitness& witness, const ModelParams& params) noexcept;

struct DominationReport {
    bool dominated = true;  ///< v <= w at every predator node of every record
    bool confined = true;   ///< -eta <= g and h <= eta at every record
    double min_field_margin = 0.0;
    double min_front_margin = 0.0;
    double beta_limit = 0.0;
    double interior_margin = 0.0;
    std::size_t records_checked = 0;
    StopReason stop = StopReason::Completed;
};

/// Runs the simulation and checks it against the witness at every record.
DominationReport supersolution_check(const ValidatedModel& model, const Discretization& disc,
                                     const SupersolutionWitness& witness);

/// A finished run, as needed to compare two of them.
struct RunRecord {
    ValidatedModel model;
    Discretization disc;
    Series series;
    double stencil_tolerance = 0.0;  ///< health.max_stencil_tolerance of the run
};

RunRecord run_record(const ValidatedModel& model, const Discretization& disc);

struct OrderingReport {
    bool nested = true;
    double max_violation = 0.0;  ///< max over records of max(g_big - g_small, h_small - h_big, 0)
    double max_excess = 0.0;     ///< max over records of violation - 2 eps t
    std::size_t records_compared = 0;
};

/// Front ordering between two runs that differ only in v0, with
/// v0_small <= v0_big pointwise.
OrderingReport comparison_check(const RunRecord& small, const RunRecord& big);

}  // namespace lgfb
