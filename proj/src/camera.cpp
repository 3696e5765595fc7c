#include "gsocc/camera.hpp"

#include <cmath>

namespace gsocc {

namespace {

constexpr double kPoseTolerance = 1e-6;

bool finite(const Pixel &px) { return std::isfinite(px.u) && std::isfinite(px.v); }

// Normalized image-plane coordinates of a pixel.
Eigen::Vector2d normalized(const CameraModel &cam, const Pixel &px) {
    return {(px.u - cam.cx()) / cam.fx(), (px.v - cam.cy()) / cam.fy()};
}

} // namespace

RigidTransform RigidTransform::from_quaternion(const Quat &q, const Vec3 &t) {
    if (!(q.norm() > 0.0)) {
        throw Error(ErrorCode::kInvalidPose, "pose quaternion has zero norm");
    }
    return {q.normalized().toRotationMatrix(), t};
}

RigidTransform RigidTransform::inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
}

CameraModel::CameraModel(double fx, double fy, double cx, double cy, int width, int height,
                         RigidTransform pose)
    : mFx(fx), mFy(fy), mCx(cx), mCy(cy), mWidth(width), mHeight(height),
      mPose(std::move(pose)) {
    if (!(std::isfinite(fx) && fx > 0.0 && std::isfinite(fy) && fy > 0.0)) {
        throw Error(ErrorCode::kInvalidInput, "focal lengths must be finite and positive");
    }
    if (!(std::isfinite(cx) && std::isfinite(cy))) {
        throw Error(ErrorCode::kInvalidInput, "principal point must be finite");
    }
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::kInvalidInput, "image size must be at least 1x1");
    }
    const Mat3 &R = mPose.rotation;
    if (!R.allFinite() || !mPose.translation.allFinite()) {
        throw Error(ErrorCode::kInvalidPose, "pose must be finite");
    }
    const double orth = (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (orth > kPoseTolerance || std::abs(R.determinant() - 1.0) > kPoseTolerance) {
        throw Error(ErrorCode::kInvalidPose, "pose rotation is not a proper rotation");
    }
}

Vec3 ray_direction(const CameraModel &cam, const Pixel &px) {
    if (!finite(px)) {
        throw Error(ErrorCode::kInvalidInput, "pixel coordinates must be finite");
    }
    const Eigen::Vector2d xy = normalized(cam, px);
    return Vec3(xy.x(), xy.y(), 1.0) / std::sqrt(xy.squaredNorm() + 1.0);
}

Vec3 backproject(const CameraModel &cam, const Pixel &px, double distance) {
    if (!(std::isfinite(distance) && distance > 0.0)) {
        throw Error(ErrorCode::kInvalidDepth, "ray distance must be finite and positive");
    }
    return distance * ray_direction(cam, px);
}

Projection project(const CameraModel &cam, const Vec3 &p) {
    if (!p.allFinite()) {
        throw Error(ErrorCode::kInvalidInput, "point must be finite");
    }
    if (!(p.z() > 0.0)) {
        throw Error(ErrorCode::kBehindCamera, "point is not in front of the camera");
    }
    return {{cam.fx() * (p.x() / p.z()) + cam.cx(), cam.fy() * (p.y() / p.z()) + cam.cy()},
            p.norm()};
}

double z_depth_to_ray_distance(const CameraModel &cam, const Pixel &px, double z) {
    if (!(std::isfinite(z) && z > 0.0)) {
        throw Error(ErrorCode::kInvalidDepth, "z-depth must be finite and positive");
    }
    if (!finite(px)) {
        throw Error(ErrorCode::kInvalidInput, "pixel coordinates must be finite");
    }
    return z * std::sqrt(normalized(cam, px).squaredNorm() + 1.0);
}

GaussianPrimitive to_world(const CameraModel &cam, const GaussianPrimitive &g) {
    const RigidTransform &pose = cam.pose();
    GaussianPrimitive out = g;
    out.mean = pose.apply(g.mean);
    out.rotation = (Quat(pose.rotation) * g.rotation).normalized();
    return out;
}

GaussianSet to_world(const CameraModel &cam, const GaussianSet &set) {
    if (set.frame() == Frame::kWorld) {
        throw Error(ErrorCode::kFrameMismatch, "set is already in the world frame");
    }
    GaussianSet out(set.num_classes(), Frame::kWorld);
    for (const auto &g : set) {
        out.push_back(to_world(cam, g));
    }
    return out;
}

} // namespace gsocc
