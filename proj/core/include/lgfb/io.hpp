#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lgfb/analysis.hpp"
#include "lgfb/model.hpp"
#include "lgfb/solver.hpp"
#include "lgfb/sweep.hpp"

namespace lgfb {

struct OutputSpec {
    std::string dir = "out";
    bool snapshot = true;
    bool plot_data = false;

    bool operator==(const OutputSpec&) const = default;
};

/// Everything a run needs. The JSON grammar is documented in docs/config.md.
struct RunConfig {
    ModelParams model;
    InitialData init;
    Discretization disc;
    ClassificationCriteria criteria;
    OutputSpec output;

    bool operator==(const RunConfig&) const = default;
};

/// Strict parse: unknown keys are fatal, omitted discretization/criteria/output
/// fields take defaults, model constraints are checked. Table paths are
/// resolved relative to `base_dir`.
/// Errors: SyntaxError (with line/column), UnknownKey, ConstraintViolation.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
/// Pretty-printed JSON that parse_config reads back to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

/// "# key: value" lines written ahead of the column header.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Full-precision (17 significant digits) decimal text.
std::string format_double(double value);

/// Metadata block for a run: version, echoed config with resolved defaults,
/// derived constants, and the verdict if one is given.
Metadata run_metadata(const RunConfig& config, const Solver& solver,
                      const std::optional<Classification>& verdict = std::nullopt);

inline constexpr std::string_view kSeriesHeader = "t,g,h,gdot,hdot,span,max_v,min_u_core,max_u,floor_hits";
inline constexpr std::string_view kSnapshotHeader = "x,u,v";

void write_series(const Series& series, const std::filesystem::path& path, const Metadata& metadata = {});

struct SeriesFile {
    Series series;
    Metadata metadata;

    [[nodiscard]] std::optional<std::string> find(std::string_view key) const;
};

SeriesFile read_series(const std::filesystem::path& path);

/// Columns x, u, v on the prey grid; v is 0 outside (g, h).
void write_snapshot(const Solver& solver, const SimState& state, const std::filesystem::path& path,
                    const Metadata& metadata = {});

/// fronts.csv (t, g, h) and span.csv (t, span, with span_crit in the header).
void write_plot_data(const Series& series, double span_crit, const std::filesystem::path& dir,
                     const Metadata& metadata = {});

std::string format_grid(const GridTable& table);
void write_grid(const GridTable& table, const std::filesystem::path& path);

}  // namespace lgfb
