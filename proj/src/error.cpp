#include "matteforge/error.hpp"

namespace matteforge {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ImageTooSmall: return "ImageTooSmall";
        case ErrorCode::InvalidTarget: return "InvalidTarget";
        case ErrorCode::InvalidBoundingBox: return "InvalidBoundingBox";
        case ErrorCode::TooFewPatches: return "TooFewPatches";
        case ErrorCode::DegenerateSegmentation: return "DegenerateSegmentation";
        case ErrorCode::NoViableCandidate: return "NoViableCandidate";
        case ErrorCode::InvalidOverride: return "InvalidOverride";
        case ErrorCode::SolverDidNotConverge: return "SolverDidNotConverge";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::DeadlineExceeded: return "DeadlineExceeded";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error& Error::with_stage(std::string stage) {
    stage_ = std::move(stage);
    return *this;
}

Error& Error::with_residual(double residual) {
    residual_ = residual;
    return *this;
}

}  // namespace matteforge
