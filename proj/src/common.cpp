#include "gsocc/common.hpp"

namespace gsocc {

const char *to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kInvalidDepth: return "invalid-depth";
    case ErrorCode::kBehindCamera: return "behind-camera";
    case ErrorCode::kInvalidPose: return "invalid-pose";
    case ErrorCode::kDegenerateGaussian: return "degenerate-gaussian";
    case ErrorCode::kInvalidLabel: return "invalid-label";
    case ErrorCode::kFrameMismatch: return "frame-mismatch";
    case ErrorCode::kClassCountMismatch: return "class-count-mismatch";
    case ErrorCode::kGridMismatch: return "grid-mismatch";
    case ErrorCode::kUndefinedMetric: return "undefined-metric";
    case ErrorCode::kUndefinedLoss: return "undefined-loss";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kIo: return "io";
    }
    return "unknown";
}

} // namespace gsocc
