#pragma once

#include <stdexcept>
#include <string>

namespace lpma {

/// Failure category; callers map these to process exit codes.
enum class ErrorCode {
    InvalidSpec,
    InvalidInput,
    InsufficientSample,
    SingularDesign,
    InfeasibleBand,
    DegenerateExtension,
    NumericalCovariance,
    PipelineFailure,
    IncompleteGrid,
    IoFailure,
};

/// @brief Stable identifier string for an error code (used in diagnostics).
[[nodiscard]] constexpr const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidSpec: return "invalid-spec";
        case ErrorCode::InvalidInput: return "invalid-input";
        case ErrorCode::InsufficientSample: return "insufficient-sample";
        case ErrorCode::SingularDesign: return "singular-design";
        case ErrorCode::InfeasibleBand: return "infeasible-band";
        case ErrorCode::DegenerateExtension: return "degenerate-extension";
        case ErrorCode::NumericalCovariance: return "numerical-covariance";
        case ErrorCode::PipelineFailure: return "pipeline-failure";
        case ErrorCode::IncompleteGrid: return "incomplete-grid";
        case ErrorCode::IoFailure: return "io-failure";
    }
    return "unknown";
}

/// @brief Exception carrying a toolkit error category and an optional numeric detail
/// (e.g. the offending condition number for a singular design).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, double detail = 0.0)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code),
          detail_(detail) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] double detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    double detail_;
};

}  // namespace lpma
