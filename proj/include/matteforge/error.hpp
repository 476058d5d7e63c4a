#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace matteforge {

enum class ErrorCode {
    ImageTooSmall,
    InvalidTarget,
    InvalidBoundingBox,
    TooFewPatches,
    DegenerateSegmentation,
    NoViableCandidate,
    InvalidOverride,
    SolverDidNotConverge,
    DimensionMismatch,
    InvalidArgument,
    IoError,
    DeadlineExceeded,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every module. `stage` names the pipeline stage that failed
/// when the error crossed the pipeline boundary (empty otherwise).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    const std::string& stage() const noexcept { return stage_; }
    /// Achieved relative residual, set only for SolverDidNotConverge.
    std::optional<double> residual() const noexcept { return residual_; }

    Error& with_stage(std::string stage);
    Error& with_residual(double residual);

private:
    ErrorCode code_;
    std::string stage_;
    std::optional<double> residual_;
};

}  // namespace matteforge
