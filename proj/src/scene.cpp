#include "gsocc/scene.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace gsocc {

namespace {

constexpr double kFaceTolerance = 1e-12;
constexpr double kMinHitDistance = 1e-12;

bool inside_open(const Vec3 &p, const Vec3 &lo, const Vec3 &hi) {
    return (p.array() > lo.array()).all() && (p.array() < hi.array()).all();
}

int shell_class(const RayHit &hit) {
    if (hit.axis == 2) {
        return hit.side < 0 ? kFloor : kCeiling;
    }
    return kWall;
}

} // namespace

void SyntheticScene::validate(std::size_t num_classes) const {
    if (!interior_min.allFinite() || !interior_max.allFinite() ||
        (interior_max.array() <= interior_min.array()).any()) {
        throw Error(ErrorCode::kInvalidInput, "room interior must have positive extent");
    }
    if (!(shell_thickness > 0.0)) {
        throw Error(ErrorCode::kInvalidInput, "shell thickness must be positive");
    }
    for (const auto &box : boxes) {
        if ((box.max.array() <= box.min.array()).any()) {
            throw Error(ErrorCode::kInvalidInput, "scene box must have positive extent");
        }
        if ((box.min.array() < interior_min.array()).any() ||
            (box.max.array() > interior_max.array()).any()) {
            throw Error(ErrorCode::kInvalidInput, "scene box leaves the room interior");
        }
        if (box.label < 1 || static_cast<std::size_t>(box.label) >= num_classes) {
            throw Error(ErrorCode::kInvalidLabel, "scene box class outside 1..N_c-1");
        }
    }
}

std::optional<RayHit> intersect_box_faces(const Vec3 &origin, const Vec3 &dir,
                                          const Vec3 &box_min, const Vec3 &box_max) {
    std::optional<RayHit> best;
    for (int axis = 0; axis < 3; ++axis) {
        if (dir[axis] == 0.0) {
            continue;
        }
        const int a1 = (axis + 1) % 3;
        const int a2 = (axis + 2) % 3;
        for (int side : {-1, 1}) {
            const double plane = side < 0 ? box_min[axis] : box_max[axis];
            const double t = (plane - origin[axis]) / dir[axis];
            if (!(t > kMinHitDistance)) {
                continue;
            }
            if (best && t >= best->distance) {
                continue;
            }
            const double h1 = origin[a1] + t * dir[a1];
            const double h2 = origin[a2] + t * dir[a2];
            const double tol1 = kFaceTolerance * (1.0 + std::abs(h1));
            const double tol2 = kFaceTolerance * (1.0 + std::abs(h2));
            if (h1 < box_min[a1] - tol1 || h1 > box_max[a1] + tol1 || h2 < box_min[a2] - tol2 ||
                h2 > box_max[a2] + tol2) {
                continue;
            }
            best = RayHit{t, axis, side};
        }
    }
    return best;
}

RenderedFrame render_depth(const SyntheticScene &scene, const CameraModel &cam) {
    RenderedFrame frame{DepthMap(cam.width(), cam.height(), std::numeric_limits<double>::quiet_NaN()),
                        ClassMap(cam.width(), cam.height(), 0)};
    const Vec3 origin = cam.pose().translation;
    const bool inside_room = inside_open(origin, scene.interior_min, scene.interior_max);
    const Vec3 room_lo = inside_room ? scene.interior_min : scene.outer_min();
    const Vec3 room_hi = inside_room ? scene.interior_max : scene.outer_max();

    for (int v = 0; v < cam.height(); ++v) {
        for (int u = 0; u < cam.width(); ++u) {
            const Vec3 dir = cam.pose().rotation * ray_direction(cam, {u + 0.5, v + 0.5});
            double best = std::numeric_limits<double>::infinity();
            int label = 0;
            if (auto hit = intersect_box_faces(origin, dir, room_lo, room_hi)) {
                best = hit->distance;
                label = shell_class(*hit);
            }
            for (const auto &box : scene.boxes) {
                if (auto hit = intersect_box_faces(origin, dir, box.min, box.max);
                    hit && hit->distance < best) {
                    best = hit->distance;
                    label = box.label;
                }
            }
            if (label != 0) {
                frame.depth.at(u, v) = best;
                frame.classes.at(u, v) = static_cast<std::uint8_t>(label);
            }
        }
    }
    return frame;
}

int scene_label_at(const SyntheticScene &scene, const Vec3 &p) {
    const SceneBox *inner = nullptr;
    for (const auto &box : scene.boxes) {
        if (box.contains(p) && (!inner || box.volume() < inner->volume())) {
            inner = &box;
        }
    }
    if (inner) {
        return inner->label;
    }
    const Vec3 lo = scene.outer_min();
    const Vec3 hi = scene.outer_max();
    if ((p.array() < lo.array()).any() || (p.array() > hi.array()).any()) {
        return kEmpty;
    }
    if (p.z() < scene.interior_min.z()) {
        return kFloor;
    }
    if (p.z() > scene.interior_max.z()) {
        return kCeiling;
    }
    if ((p.array() < scene.interior_min.array()).any() ||
        (p.array() > scene.interior_max.array()).any()) {
        return kWall;
    }
    return kEmpty;
}

OccupancyGrid oracle_occupancy(const SyntheticScene &scene, const GridSpec &spec) {
    spec.validate();
    OccupancyGrid grid(spec);
    for (int k = 0; k < spec.dims[2]; ++k) {
        for (int j = 0; j < spec.dims[1]; ++j) {
            for (int i = 0; i < spec.dims[0]; ++i) {
                const int label = scene_label_at(scene, spec.voxel_center(i, j, k));
                const std::size_t idx = spec.linear_index(i, j, k);
                grid.labels[idx] = static_cast<std::uint8_t>(label);
                grid.scores[idx] = label != 0 ? 1.0 : 0.0;
            }
        }
    }
    return grid;
}

SyntheticScene generate_room_scene(std::uint64_t seed, const GridSpec &spec,
                                   const SceneGenOptions &options) {
    spec.validate();
    const double vs = spec.voxel_size;
    const int shell = std::max(1, static_cast<int>(std::lround(options.shell_thickness / vs)));
    for (int a = 0; a < 3; ++a) {
        if (spec.dims[a] < 2 * shell + 8) {
            throw Error(ErrorCode::kInvalidInput, "grid too small for a generated room");
        }
    }

    SyntheticScene scene;
    // Outer shell faces coincide with the grid boundary.
    scene.shell_thickness = shell * vs - options.inset;
    scene.interior_min = spec.origin + Vec3::Constant(shell * vs - options.inset);
    scene.interior_max = spec.origin + spec.extent() - Vec3::Constant(shell * vs - options.inset);

    std::mt19937_64 rng(seed);
    auto uniform_int = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    static constexpr int kBoxClasses[] = {kChair, kBed, kSofa, kTable, kTv, kFurniture, kObjects};

    const int nx = spec.dims[0];
    const int ny = spec.dims[1];
    const int nz = spec.dims[2];
    const int count = uniform_int(options.min_boxes, std::max(options.min_boxes, options.max_boxes));
    std::vector<std::array<int, 4>> footprints; // i0, i1, j0, j1 (voxel bounds, exclusive hi)

    for (int attempt = 0; attempt < 200 && static_cast<int>(footprints.size()) < count; ++attempt) {
        const int sx = uniform_int(options.min_depth, options.max_depth);
        const int sy = uniform_int(6, 9);
        const int sz = uniform_int(6, std::min(12, nz - 2 * shell - 4));
        // Furniture stands on the floor against the x-max wall.
        const int i1 = nx - shell;
        const int i0 = i1 - sx;
        const int j0 = uniform_int(shell + 1, ny - shell - 1 - sy);
        const std::array<int, 4> fp{i0, i1, j0, j0 + sy};
        bool clear = true;
        for (const auto &o : footprints) {
            if (fp[2] < o[3] + 2 && o[2] < fp[3] + 2) {
                clear = false;
                break;
            }
        }
        if (!clear) {
            continue;
        }
        footprints.push_back(fp);
        SceneBox box;
        box.min = spec.origin + Vec3(fp[0] * vs + options.inset, fp[2] * vs + options.inset, 0.0);
        box.max = spec.origin + Vec3(0.0, fp[3] * vs - options.inset, (shell + sz) * vs - options.inset);
        box.min.z() = scene.interior_min.z();
        box.max.x() = scene.interior_max.x();
        box.label = kBoxClasses[uniform_int(0, static_cast<int>(std::size(kBoxClasses)) - 1)];
        scene.boxes.push_back(box);
    }
    scene.validate(spec.num_classes);
    return scene;
}

RigidTransform look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up) {
    const Vec3 forward = (target - eye).normalized();
    Vec3 right = forward.cross(up);
    if (right.norm() < 1e-12) {
        throw Error(ErrorCode::kInvalidPose, "look_at direction is parallel to up");
    }
    right.normalize();
    const Vec3 down = forward.cross(right);
    RigidTransform pose;
    pose.rotation.col(0) = right;
    pose.rotation.col(1) = down;
    pose.rotation.col(2) = forward;
    pose.translation = eye;
    return pose;
}

CameraModel make_camera(int width, int height, double hfov, const RigidTransform &pose) {
    if (!(hfov > 0.0 && hfov < M_PI)) {
        throw Error(ErrorCode::kInvalidInput, "horizontal field of view must lie in (0, pi)");
    }
    const double f = 0.5 * width / std::tan(0.5 * hfov);
    return CameraModel(f, f, 0.5 * width, 0.5 * height, width, height, pose);
}

CameraModel default_room_camera(const GridSpec &spec, int width, int height, double hfov) {
    const Vec3 lo = spec.origin;
    const Vec3 ext = spec.extent();
    const Vec3 eye = lo + Vec3(0.35, 0.5 * ext.y(), std::min(1.2, 0.42 * ext.z()));
    const Vec3 target = lo + Vec3(ext.x(), 0.5 * ext.y(), 0.28 * ext.z());
    return make_camera(width, height, hfov, look_at(eye, target));
}

std::array<CameraModel, 2> half_view_cameras(const GridSpec &spec, int width, int height,
                                             double hfov) {
    const Vec3 lo = spec.origin;
    const Vec3 ext = spec.extent();
    const Vec3 eye = lo + Vec3(0.5 * ext.x(), 0.5 * ext.y(), std::min(1.2, 0.42 * ext.z()));
    const Vec3 ahead = lo + Vec3(ext.x(), 0.5 * ext.y(), 0.28 * ext.z());
    const Vec3 behind = lo + Vec3(0.0, 0.5 * ext.y(), 0.28 * ext.z());
    return {make_camera(width, height, hfov, look_at(eye, ahead)),
            make_camera(width, height, hfov, look_at(eye, behind))};
}

} // namespace gsocc
