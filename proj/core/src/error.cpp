#include "lgfb/error.hpp"

namespace lgfb {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
        case ErrorCode::InitialProfileViolation: return "InitialProfileViolation";
        case ErrorCode::NoPositiveEquilibrium: return "NoPositiveEquilibrium";
        case ErrorCode::DegenerateInterval: return "DegenerateInterval";
        case ErrorCode::GridTooSmall: return "GridTooSmall";
        case ErrorCode::DomainTooSmall: return "DomainTooSmall";
        case ErrorCode::InvalidDiscretization: return "InvalidDiscretization";
        case ErrorCode::CflViolation: return "CflViolation";
        case ErrorCode::FrontNearTruncation: return "FrontNearTruncation";
        case ErrorCode::BoundBlowup: return "BoundBlowup";
        case ErrorCode::NonmonotoneFronts: return "NonmonotoneFronts";
        case ErrorCode::AssumptionViolated: return "AssumptionViolated";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::WindowOutsideFronts: return "WindowOutsideFronts";
        case ErrorCode::WitnessInvalid: return "WitnessInvalid";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::IncomparableRuns: return "IncomparableRuns";
        case ErrorCode::NoBracket: return "NoBracket";
        case ErrorCode::UndecidedProbe: return "UndecidedProbe";
        case ErrorCode::RunCapExceeded: return "RunCapExceeded";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::ConstraintViolation: return "ConstraintViolation";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

std::string join(const std::vector<Violation>& violations) {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.field + " (" + std::string(to_string(v.code)) + "): " + v.message;
    }
    return out;
}

ErrorCode first_code(const std::vector<Violation>& violations) {
    return violations.empty() ? ErrorCode::ConstraintViolation : violations.front().code;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(first_code(violations), join(violations)), violations_(std::move(violations)) {}

}  // namespace lgfb
