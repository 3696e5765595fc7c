#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace gsocc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

enum class ErrorCode {
    kInvalidInput,
    kInvalidDepth,
    kBehindCamera,
    kInvalidPose,
    kDegenerateGaussian,
    kInvalidLabel,
    kFrameMismatch,
    kClassCountMismatch,
    kGridMismatch,
    kUndefinedMetric,
    kUndefinedLoss,
    kFormat,
    kIo,
};

const char *to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(what), mCode(code) {}

    ErrorCode code() const noexcept { return mCode; }

private:
    ErrorCode mCode;
};

/// Coordinate frame a set of primitives is expressed in.
enum class Frame { kCamera, kWorld };

} // namespace gsocc
