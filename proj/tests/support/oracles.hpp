// Independent reference implementations used by the unit and acceptance
// tests.  Each one takes a deliberately different route from the library
// code it checks (dense inverses, slab tests, linear scans, set functions).
#pragma once

#include "gsocc/camera.hpp"
#include "gsocc/gaussian.hpp"
#include "gsocc/metrics.hpp"
#include "gsocc/splatting.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace gsocc::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng &rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Quat random_rotation(Rng &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Quat q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    return q;
}

inline std::vector<double> random_logits(Rng &rng, std::size_t nc, double spread = 3.0) {
    std::vector<double> c(nc);
    for (auto &v : c) v = uniform(rng, -spread, spread);
    return c;
}

inline GaussianPrimitive random_gaussian(Rng &rng, const Vec3 &lo, const Vec3 &hi, std::size_t nc,
                                         double smin = 0.02, double smax = 0.25) {
    const Vec3 mean(uniform(rng, lo.x(), hi.x()), uniform(rng, lo.y(), hi.y()),
                    uniform(rng, lo.z(), hi.z()));
    const Vec3 scale(uniform(rng, smin, smax), uniform(rng, smin, smax), uniform(rng, smin, smax));
    return GaussianPrimitive::create(mean, scale, random_rotation(rng), uniform(rng, 0.0, 1.0),
                                     random_logits(rng, nc));
}

inline GaussianSet random_set(Rng &rng, std::size_t n, const GridSpec &spec, double margin = 0.3) {
    GaussianSet set(spec.num_classes, Frame::kWorld);
    const Vec3 lo = spec.origin - Vec3::Constant(margin);
    const Vec3 hi = spec.origin + spec.extent() + Vec3::Constant(margin);
    const double vs = spec.voxel_size;
    for (std::size_t i = 0; i < n; ++i) {
        set.push_back(random_gaussian(rng, lo, hi, spec.num_classes, 0.25 * vs, 2.5 * vs));
    }
    return set;
}

inline RigidTransform random_pose(Rng &rng, double spread = 3.0) {
    RigidTransform t;
    t.rotation = random_rotation(rng).toRotationMatrix();
    t.translation = Vec3(uniform(rng, -spread, spread), uniform(rng, -spread, spread),
                         uniform(rng, -spread, spread));
    return t;
}

// Kernel through an explicitly inverted dense covariance, truncated at the
// same Mahalanobis radius as the library.
inline double dense_kernel(const Mat3 &precision, const Vec3 &mean, const Vec3 &p) {
    const Vec3 d = p - mean;
    const double m2 = d.transpose() * precision * d;
    return m2 > kCutoffMahalanobisSq ? 0.0 : std::exp(-0.5 * m2);
}

inline Mat3 dense_covariance(const GaussianPrimitive &g) {
    const Quat q = g.rotation.normalized();
    // Rotation matrix from the quaternion formula rather than Eigen's helper.
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    Mat3 R;
    R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    Mat3 S = Mat3::Zero();
    for (int a = 0; a < 3; ++a) S(a, a) = g.scale[a] * g.scale[a];
    return R * S * R.transpose();
}

inline int argmax_class(const std::vector<double> &masses) {
    int best = 1;
    for (int c = 2; c < static_cast<int>(masses.size()); ++c) {
        if (masses[c] > masses[best]) best = c;
    }
    return best;
}

// All-pairs splat: every Gaussian against every voxel, no culling.
inline OccupancyGrid brute_force_splat(const GaussianSet &set, const GridSpec &spec,
                                       double theta = kDefaultThetaOcc) {
    OccupancyGrid grid(spec);
    const std::size_t nc = spec.num_classes;
    std::vector<Mat3> precision;
    std::vector<std::vector<double>> probs;
    for (const auto &g : set) {
        precision.push_back(dense_covariance(g).fullPivLu().inverse());
        std::vector<double> p(nc);
        double peak = *std::max_element(g.logits.begin(), g.logits.end());
        double total = 0.0;
        for (std::size_t c = 0; c < nc; ++c) total += (p[c] = std::exp(g.logits[c] - peak));
        for (auto &v : p) v /= total;
        probs.push_back(std::move(p));
    }
    for (int k = 0; k < spec.dims[2]; ++k) {
        for (int j = 0; j < spec.dims[1]; ++j) {
            for (int i = 0; i < spec.dims[0]; ++i) {
                const Vec3 center = spec.origin + spec.voxel_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
                double keep = 1.0;
                std::vector<double> masses(nc, 0.0);
                for (std::size_t n = 0; n < set.size(); ++n) {
                    const double w = set[n].opacity * dense_kernel(precision[n], set[n].mean, center);
                    keep *= 1.0 - w;
                    for (std::size_t c = 0; c < nc; ++c) masses[c] += w * probs[n][c];
                }
                const std::size_t idx = spec.linear_index(i, j, k);
                grid.scores[idx] = 1.0 - keep;
                grid.labels[idx] =
                    grid.scores[idx] >= theta ? static_cast<std::uint8_t>(argmax_class(masses)) : 0;
            }
        }
    }
    return grid;
}

// Slab-method ray/box intersection: nearest positive hit distance.
inline std::optional<double> slab_hit(const Vec3 &o, const Vec3 &d, const Vec3 &lo, const Vec3 &hi) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (o[a] < lo[a] || o[a] > hi[a]) return std::nullopt;
            continue;
        }
        double ta = (lo[a] - o[a]) / d[a];
        double tb = (hi[a] - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t0 > t1) return std::nullopt;
    if (t0 > 0.0) return t0;
    if (t1 > 0.0) return t1; // origin inside the box
    return std::nullopt;
}

inline std::vector<std::uint32_t> linear_scan(std::span<const Vec3> points, const Vec3 &q, double r) {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if ((points[i] - q).norm() <= r) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

// Jaccard loss set function for one class: |M| / |F u M|, with M the
// mispredicted items and F the foreground items.
inline double jaccard_loss(const std::set<int> &mispredicted, const std::set<int> &foreground) {
    std::set<int> uni = foreground;
    uni.insert(mispredicted.begin(), mispredicted.end());
    if (uni.empty()) return 0.0;
    return static_cast<double>(mispredicted.size()) / static_cast<double>(uni.size());
}

// Lovasz extension by sorting errors and differencing the set function over
// growing prefixes.
inline double lovasz_prefix_oracle(const std::vector<double> &errors, const std::vector<int> &fg) {
    std::vector<int> order(errors.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return errors[a] > errors[b]; });
    std::set<int> foreground;
    for (std::size_t i = 0; i < fg.size(); ++i) {
        if (fg[i]) foreground.insert(static_cast<int>(i));
    }
    std::set<int> prefix;
    double prev = 0.0;
    double total = 0.0;
    for (int idx : order) {
        prefix.insert(idx);
        const double cur = jaccard_loss(prefix, foreground);
        total += errors[idx] * (cur - prev);
        prev = cur;
    }
    return total;
}

// Lovasz extension of a submodular function as the maximum over all orders.
inline double lovasz_permutation_oracle(const std::vector<double> &errors, const std::vector<int> &fg) {
    std::vector<int> order(errors.size());
    std::iota(order.begin(), order.end(), 0);
    std::set<int> foreground;
    for (std::size_t i = 0; i < fg.size(); ++i) {
        if (fg[i]) foreground.insert(static_cast<int>(i));
    }
    double best = -std::numeric_limits<double>::infinity();
    do {
        std::set<int> prefix;
        double prev = 0.0;
        double total = 0.0;
        for (int idx : order) {
            prefix.insert(idx);
            const double cur = jaccard_loss(prefix, foreground);
            total += errors[idx] * (cur - prev);
            prev = cur;
        }
        best = std::max(best, total);
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

struct TallyCounts {
    std::vector<std::size_t> tp, fp, fn;
    std::size_t occ_tp = 0, occ_fp = 0, occ_fn = 0;
};

inline TallyCounts tally(const OccupancyGrid &pred, const OccupancyGrid &gt,
                         const std::vector<std::uint8_t> &mask) {
    const std::size_t nc = gt.spec.num_classes;
    TallyCounts t{std::vector<std::size_t>(nc, 0), std::vector<std::size_t>(nc, 0),
                  std::vector<std::size_t>(nc, 0)};
    for (std::size_t v = 0; v < gt.labels.size(); ++v) {
        if (!mask.empty() && !mask[v]) continue;
        const int p = pred.labels[v];
        const int g = gt.labels[v];
        for (std::size_t c = 1; c < nc; ++c) {
            const bool in_p = p == static_cast<int>(c);
            const bool in_g = g == static_cast<int>(c);
            t.tp[c] += in_p && in_g;
            t.fp[c] += in_p && !in_g;
            t.fn[c] += !in_p && in_g;
        }
        t.occ_tp += p != 0 && g != 0;
        t.occ_fp += p != 0 && g == 0;
        t.occ_fn += p == 0 && g != 0;
    }
    return t;
}

// Frustum test through a homogeneous world-to-camera matrix and an intrinsic
// matrix.
inline std::vector<std::uint8_t> reprojection_mask(const GridSpec &spec, const CameraModel &cam,
                                                   double near, double far) {
    Eigen::Matrix4d cam_to_world = Eigen::Matrix4d::Identity();
    cam_to_world.topLeftCorner<3, 3>() = cam.pose().rotation;
    cam_to_world.topRightCorner<3, 1>() = cam.pose().translation;
    const Eigen::Matrix4d world_to_cam = cam_to_world.inverse();
    Mat3 K = Mat3::Identity();
    K(0, 0) = cam.fx();
    K(1, 1) = cam.fy();
    K(0, 2) = cam.cx();
    K(1, 2) = cam.cy();
    std::vector<std::uint8_t> mask(spec.voxel_count(), 0);
    for (int k = 0; k < spec.dims[2]; ++k) {
        for (int j = 0; j < spec.dims[1]; ++j) {
            for (int i = 0; i < spec.dims[0]; ++i) {
                const Vec3 w = spec.origin + spec.voxel_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
                const Eigen::Vector4d pc = world_to_cam * Eigen::Vector4d(w.x(), w.y(), w.z(), 1.0);
                if (pc.z() <= 0.0) continue;
                const Vec3 uvw = K * pc.head<3>();
                const double u = uvw.x() / uvw.z();
                const double v = uvw.y() / uvw.z();
                const double dist = pc.head<3>().norm();
                if (u >= 0.0 && u < cam.width() && v >= 0.0 && v < cam.height() && dist >= near &&
                    dist <= far) {
                    mask[spec.linear_index(i, j, k)] = 1;
                }
            }
        }
    }
    return mask;
}

} // namespace gsocc::testing
