#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lgfb/analysis.hpp"
#include "lgfb/model.hpp"
#include "lgfb/solver.hpp"

namespace lgfb {

struct BetaProbe {
    double beta = 0.0;
    Classification classification;
};

/// lo is a Vanishing beta, hi a Spreading beta. The threshold(s) lie in between;
/// nothing here claims the bracket is sharp.
struct BetaBracket {
    double lo = 0.0;
    double hi = 0.0;
    int runs = 0;
    /// Set when bisection halted on an Undecided probe; consider a longer t_end.
    std::optional<double> undecided_beta;
    std::vector<BetaProbe> probes;  ///< in execution order

    [[nodiscard]] double width() const noexcept { return hi - lo; }
};

struct BisectOptions {
    double expand_factor = 4.0;
    int max_expansions = 10;
    ClassificationCriteria criteria;
};

/// Classifies one full simulation at the given beta.
Classification classify_run(const ModelParams& params, const InitialData& init, const Discretization& disc,
                            const ClassificationCriteria& criteria);

/// Bisection on beta between a Vanishing and a Spreading run. Endpoints that
/// do not have the expected verdict are expanded geometrically (by
/// expand_factor, at most max_expansions times) before bisection starts.
BetaBracket bisect_beta(const ModelParams& params, const InitialData& init, const Discretization& disc,
                        double lo0, double hi0, double width_tol, const BisectOptions& options = {});

struct GridAxis {
    std::string name;  ///< one of a, b, d, mu, beta, h0, m
    std::vector<double> values;
};

struct GridOptions {
    std::size_t max_runs = 10000;
    unsigned threads = 1;
    ClassificationCriteria criteria;
};

struct GridRow {
    std::vector<double> coords;  ///< one value per axis, in axis order
    ModelParams params;
    std::optional<Classification> classification;
    std::optional<SeriesRecord> last;
    StopReason stop = StopReason::Completed;
    long long floor_hits = 0;
    std::string error;  ///< solver or validation failure of this row
};

struct GridTable {
    std::vector<std::string> axis_names;
    std::vector<GridRow> rows;            ///< lexicographic in the (sorted) axis values
    std::vector<std::string> anomalies;   ///< beta rows whose verdict is not monotone
};

/// Runs the Cartesian product of the axes. Row order and content do not
/// depend on `threads`.
GridTable run_grid(const std::vector<GridAxis>& axes, const ModelParams& base, const InitialData& init,
                   const Discretization& disc, const GridOptions& options = {});

}  // namespace lgfb
