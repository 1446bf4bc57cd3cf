#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lgfb/model.hpp"
#include "lgfb/transform.hpp"
#include "lgfb/tridiagonal.hpp"

namespace lgfb {

/// Numerical setup. The prey lives on a uniform grid over [-L, L] with Nx
/// intervals and homogeneous Neumann ends; the predator lives on a uniform
/// grid over y in [-1, 1] with Ny intervals and z(+-1) = 0.
struct Discretization {
    double L = 60.0;
    std::optional<int> nx;  ///< defaults to ceil(L Ny / 2)
    int ny = 400;
    double dt = 0.005;      ///< largest step; simulate() shortens steps to honour the CFL bound
    double t_end = 200.0;
    double cfl_safety = 0.5;
    std::optional<double> u_floor;  ///< defaults to 1e-8 a
    double front_margin = 5.0;
    double record_every = 0.5;
    double report_window = 5.0;  ///< W: min_u_core is taken over [-W, W]

    bool operator==(const Discretization&) const = default;
};

/// Fills defaulted fields and checks the invariants; throws
/// InvalidDiscretization or DomainTooSmall.
Discretization resolve(const Discretization& disc, const ModelParams& params);

struct SimState {
    double t = 0.0;
    std::vector<double> u;  ///< prey at the Nx+1 physical nodes
    std::vector<double> z;  ///< predator at the Ny+1 computational nodes
    FrontState front;
    long long floor_hits = 0;
    long long step_count = 0;

    bool operator==(const SimState&) const = default;
};

struct SeriesRecord {
    double t = 0.0;
    double g = 0.0;
    double h = 0.0;
    double gdot = 0.0;
    double hdot = 0.0;
    double span = 0.0;
    double max_v = 0.0;
    double min_u_core = 0.0;
    double max_u = 0.0;
    long long floor_hits = 0;

    bool operator==(const SeriesRecord&) const = default;
};

using Series = std::vector<SeriesRecord>;

enum class StopReason { Completed, FrontNearTruncation };

struct HealthReport {
    StopReason stop = StopReason::Completed;
    long long steps = 0;
    long long floor_hits = 0;
    double max_u_ratio = 0.0;  ///< max over time of max u / A
    double max_v_ratio = 0.0;  ///< max over time of max v / B
    double min_core_u = 0.0;   ///< infimum over records of min_u_core
    double min_dt = 0.0;
    double stencil_constant = kStencilConstant;
    double max_stencil_tolerance = 0.0;  ///< largest eps_stencil seen (speed units)
    long long tolerated_backsteps = 0;   ///< wrong-signed front moves within tolerance
    double max_backstep = 0.0;
    /// |change of total predator mass - integrated reaction + Stefan outflow|,
    /// relative to the mass scale. Reported only.
    double stefan_balance_residual = 0.0;
};

struct SimulationResult {
    Series series;
    SimState final_state;
    HealthReport health;
};

/// Time stepper owning the workspace for one configuration. Not thread-safe;
/// use one instance per worker.
class Solver {
public:
    Solver(ValidatedModel model, const Discretization& disc);

    [[nodiscard]] const ValidatedModel& model() const noexcept { return model_; }
    [[nodiscard]] const Discretization& disc() const noexcept { return disc_; }
    [[nodiscard]] const DerivedConstants& constants() const noexcept { return constants_; }
    [[nodiscard]] double dx() const noexcept { return dx_; }
    [[nodiscard]] double dy() const noexcept { return dy_; }
    [[nodiscard]] double x_at(std::size_t j) const noexcept { return -disc_.L + static_cast<double>(j) * dx_; }
    [[nodiscard]] double y_at(std::size_t i) const noexcept { return -1.0 + static_cast<double>(i) * dy_; }

    [[nodiscard]] SimState initial_state() const;

    /// Front speeds from the boundary gradients of the current z.
    [[nodiscard]] FrontSpeeds speeds(const SimState& s) const;
    /// Largest dt allowed by dt |zeta| <= cfl_safety dy for the current state.
    [[nodiscard]] double cfl_limit(const SimState& s) const;

    /// One IMEX step of size dt. On error `s` is left untouched.
    void advance(SimState& s, double dt);

    [[nodiscard]] SeriesRecord record(const SimState& s) const;
    /// Prey density at a predator node position x (linear interpolation).
    [[nodiscard]] double prey_at(const SimState& s, double x) const;
    /// Predator density at physical x; zero outside (g, h).
    [[nodiscard]] double predator_at(const SimState& s, double x) const;
    /// Predator density on every physical node.
    [[nodiscard]] std::vector<double> predator_on_prey_grid(const SimState& s) const;

    struct StepDiagnostics {
        double stencil_tolerance = 0.0;
        double backstep = 0.0;  ///< largest wrong-signed front displacement (>= 0)
        double max_u = 0.0;
        double max_z = 0.0;
        double mass_before = 0.0;
        double mass_source = 0.0;  ///< dt (integral of reaction - Stefan outflow)
    };
    [[nodiscard]] const StepDiagnostics& last_step() const noexcept { return diag_; }

private:
    void prepare_prey_matrix(double dt);

    ValidatedModel model_;
    Discretization disc_;
    DerivedConstants constants_;
    double dx_ = 0.0;
    double dy_ = 0.0;
    double u_floor_ = 0.0;
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;

    double prey_dt_ = -1.0;
    std::vector<double> prey_lower_, prey_diag_, prey_upper_;
    std::vector<double> pred_lower_, pred_diag_, pred_upper_;
    std::vector<double> u_next_, z_next_, v_on_prey_, w_on_pred_;
    TridiagonalSolver thomas_;
    StepDiagnostics diag_;
};

/// Tolerance on the a priori bounds: u <= A (1 + tol), z <= B (1 + tol).
inline constexpr double kBoundTolerance = 1e-6;

SimState init_state(const ValidatedModel& model, const Discretization& disc);

/// Single step of exactly disc.dt; throws CflViolation if disc.dt is too large.
SimState step(const SimState& state, const ValidatedModel& model, const Discretization& disc);

/// Called at every record with the state being recorded.
using RecordObserver = std::function<void(const Solver&, const SimState&, const SeriesRecord&)>;

/// Integrates to t_end, or until a front comes within front_margin of +-L
/// (reported as StopReason::FrontNearTruncation). Other errors propagate.
SimulationResult simulate(const ValidatedModel& model, const Discretization& disc,
                          const RecordObserver& observer = {});

struct RefinementLevel {
    Discretization disc;
    double g = 0.0;
    double h = 0.0;
    double span = 0.0;
};

/// Observed order from three consecutive levels with refinement ratio 2;
/// empty when the differences vanish (order undefined).
struct ObservedOrder {
    std::optional<double> g;
    std::optional<double> h;
    std::optional<double> span;
};

struct RefinementReport {
    double t_compare = 0.0;
    std::vector<RefinementLevel> levels;
    std::vector<ObservedOrder> orders;
    bool undefined = false;  ///< some order could not be computed
};

/// Runs `levels` simulations, halving dt and doubling Nx, Ny each time, and
/// compares g, h and the span at t_compare.
RefinementReport refine_check(const ValidatedModel& model, const Discretization& base, int levels,
                              double t_compare);
/// Same comparison over explicitly given discretizations (finest last).
RefinementReport refine_check(const ValidatedModel& model, std::span<const Discretization> discs,
                              double t_compare);

}  // namespace lgfb
