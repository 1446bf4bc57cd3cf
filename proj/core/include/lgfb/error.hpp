#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lgfb {

enum class ErrorCode {
    // model
    NonPositiveParameter,
    InitialProfileViolation,
    NoPositiveEquilibrium,
    // transform
    DegenerateInterval,
    GridTooSmall,
    // solver
    DomainTooSmall,
    InvalidDiscretization,
    CflViolation,
    FrontNearTruncation,
    BoundBlowup,
    NonmonotoneFronts,
    // analysis
    AssumptionViolated,
    EmptySeries,
    WindowOutsideFronts,
    WitnessInvalid,
    PreconditionViolated,
    IncomparableRuns,
    // sweep
    NoBracket,
    UndecidedProbe,
    RunCapExceeded,
    // io
    SyntaxError,
    UnknownKey,
    ConstraintViolation,
    IoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct Violation {
    ErrorCode code;
    std::string field;
    std::string message;
};

/// Raised by validation with the full list of violated constraints.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);

    [[nodiscard]] const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

}  // namespace lgfb
