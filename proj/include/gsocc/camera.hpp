#pragma once

#include "gsocc/common.hpp"
#include "gsocc/gaussian.hpp"

namespace gsocc {

/// Rigid camera-to-world transform.
struct RigidTransform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static RigidTransform identity() { return {}; }
    static RigidTransform from_quaternion(const Quat &q, const Vec3 &t);

    Vec3 apply(const Vec3 &p) const { return rotation * p + translation; }
    Vec3 apply_inverse(const Vec3 &p) const { return rotation.transpose() * (p - translation); }
    RigidTransform inverse() const;
};

/// Continuous pixel coordinate; u along width, v along height, origin top-left.
struct Pixel {
    double u = 0.0;
    double v = 0.0;
};

struct Projection {
    Pixel pixel;
    double distance = 0.0; ///< metric distance along the ray
};

/// Pinhole intrinsics plus camera-to-world pose.  The camera looks along +z.
class CameraModel {
public:
    /// Throws Error(kInvalidInput) for non-positive focal lengths or image
    /// size, Error(kInvalidPose) when the rotation is not a proper rotation
    /// (orthonormality / det checked to 1e-6).
    CameraModel(double fx, double fy, double cx, double cy, int width, int height,
                RigidTransform pose = RigidTransform::identity());

    double fx() const { return mFx; }
    double fy() const { return mFy; }
    double cx() const { return mCx; }
    double cy() const { return mCy; }
    int width() const { return mWidth; }
    int height() const { return mHeight; }
    const RigidTransform &pose() const { return mPose; }

    bool in_image(const Pixel &px) const {
        return px.u >= 0.0 && px.u < mWidth && px.v >= 0.0 && px.v < mHeight;
    }

private:
    double mFx, mFy, mCx, mCy;
    int mWidth, mHeight;
    RigidTransform mPose;
};

/// Unit ray [x, y, 1]/sqrt(x^2+y^2+1), x = (u-cx)/fx, y = (v-cy)/fy.
Vec3 ray_direction(const CameraModel &cam, const Pixel &px);

/// d * ray_direction(cam, px), with d a ray distance (not z-depth).
Vec3 backproject(const CameraModel &cam, const Pixel &px, double distance);

/// Inverse of backproject for points with z > 0.
Projection project(const CameraModel &cam, const Vec3 &p_cam);

/// Ray distance for a z-depth measurement at pixel px.
double z_depth_to_ray_distance(const CameraModel &cam, const Pixel &px, double z);

/// Maps a camera-frame primitive into the world frame: mu' = R mu + t,
/// rotation composed with R; scale, opacity and logits unchanged.
GaussianPrimitive to_world(const CameraModel &cam, const GaussianPrimitive &g);

/// Whole-set version; the result is tagged Frame::kWorld.
GaussianSet to_world(const CameraModel &cam, const GaussianSet &set);

} // namespace gsocc
