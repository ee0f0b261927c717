#include "irisct/error.hpp"

namespace irisct {

const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::CorruptImage: return "CorruptImage";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::SpecOutOfBounds: return "SpecOutOfBounds";
        case ErrorCode::NoBoundaryFound: return "NoBoundaryFound";
        case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::TooSmall: return "TooSmall";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::UnsupportedDirectionCount: return "UnsupportedDirectionCount";
        case ErrorCode::MalformedPyramid: return "MalformedPyramid";
        case ErrorCode::EmptyOverlap: return "EmptyOverlap";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegenerateSplit: return "DegenerateSplit";
        case ErrorCode::DegenerateLabels: return "DegenerateLabels";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::BadConfig: return "BadConfig";
        case ErrorCode::BadRecord: return "BadRecord";
    }
    return "UnknownError";
}

} // namespace irisct
