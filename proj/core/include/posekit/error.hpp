#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posekit {

enum class ErrorCode {
    InvalidParameter,
    TooFewPoints,
    EmptyIndex,
    EmptyCloud,
    EmptyFeatureSet,
    DegenerateConfiguration,
    TooFewCorrespondences,
    NoOverlap,
    SingleClass,
    DimensionMismatch,
    EmptyImage,
    ParseError,
    IoError,
    UnknownInstance,
    NoMatch,
    DegenerateBox,
    EmptyProjection,
    UndefinedRecall,
    EmptyCrop,
    CompatibilityError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Exception carrying a machine-readable code. Everything in posekit that
// fails hard throws this type; soft failures are reported through flags on
// the result structs instead.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace posekit
