#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "matteforge/error.hpp"

namespace matteforge {

/// Optional wall-clock budget for long computations. Checked between stages
/// and inside iterative loops; throws DeadlineExceeded once passed.
class Deadline {
public:
    using Clock = std::chrono::steady_clock;

    Deadline() = default;
    static Deadline after(std::chrono::milliseconds budget) { return Deadline(Clock::now() + budget); }

    bool expired() const { return at_ && Clock::now() >= *at_; }
    void check(const std::string& stage) const {
        if (expired()) throw Error(ErrorCode::DeadlineExceeded, "compute budget exhausted").with_stage(stage);
    }

private:
    explicit Deadline(Clock::time_point at) : at_(at) {}
    std::optional<Clock::time_point> at_;
};

}  // namespace matteforge
