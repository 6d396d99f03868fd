#include "posekit/error.hpp"

namespace posekit {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::EmptyCloud: return "EmptyCloud";
        case ErrorCode::EmptyFeatureSet: return "EmptyFeatureSet";
        case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
        case ErrorCode::TooFewCorrespondences: return "TooFewCorrespondences";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyImage: return "EmptyImage";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::UnknownInstance: return "UnknownInstance";
        case ErrorCode::NoMatch: return "NoMatch";
        case ErrorCode::DegenerateBox: return "DegenerateBox";
        case ErrorCode::EmptyProjection: return "EmptyProjection";
        case ErrorCode::UndefinedRecall: return "UndefinedRecall";
        case ErrorCode::EmptyCrop: return "EmptyCrop";
        case ErrorCode::CompatibilityError: return "CompatibilityError";
    }
    return "Unknown";
}

}  // namespace posekit
