#pragma once

#include <stdexcept>
#include <string>

namespace irisct {

enum class ErrorCode {
    FileNotFound,
    UnsupportedFormat,
    CorruptImage,
    EmptyDataset,
    SpecOutOfBounds,
    NoBoundaryFound,
    DegenerateGeometry,
    TooFewRows,
    TooSmall,
    DimMismatch,
    UnsupportedDirectionCount,
    MalformedPyramid,
    EmptyOverlap,
    InsufficientData,
    NoConvergence,
    DegenerateSplit,
    DegenerateLabels,
    EmptyMask,
    BadConfig,
    BadRecord,
};

const char* to_string(ErrorCode c);

/// Single exception type for the whole library; tests and the CLI dispatch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace irisct
