#pragma once

#include <stdexcept>
#include <string>

namespace shgs {

enum class ErrorCode {
    InvalidSpec,
    EmptyGrid,
    IndexOutOfLayout,
    SupportViolation,
    DimensionMismatch,
    DegenerateGramian,
    QuadratureBudgetExceeded,
    SearchBudgetExceeded,
    RadiusTooSmall,
    NonPositiveFrameBound,
    InvalidSize,
    UnreachableFraction,
    InvalidLevels,
    InvalidScales,
    ZeroReference,
    Io,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::IndexOutOfLayout: return "IndexOutOfLayout";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateGramian: return "DegenerateGramian";
    case ErrorCode::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
    case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorCode::RadiusTooSmall: return "RadiusTooSmall";
    case ErrorCode::NonPositiveFrameBound: return "NonPositiveFrameBound";
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::UnreachableFraction: return "UnreachableFraction";
    case ErrorCode::InvalidLevels: return "InvalidLevels";
    case ErrorCode::InvalidScales: return "InvalidScales";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace shgs
