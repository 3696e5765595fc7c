#pragma once

#include "gsocc/camera.hpp"
#include "gsocc/sampling.hpp"
#include "gsocc/splatting.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace gsocc {

/// Indoor class ids, 0 = empty.
enum SemanticClass : int {
    kEmpty = 0,
    kCeiling = 1,
    kFloor = 2,
    kWall = 3,
    kWindow = 4,
    kChair = 5,
    kBed = 6,
    kSofa = 7,
    kTable = 8,
    kTv = 9,
    kFurniture = 10,
    kObjects = 11,
};

struct SceneBox {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();
    int label = kObjects;

    bool contains(const Vec3 &p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
    double volume() const { return (max - min).prod(); }
};

/// Room with a solid shell around a free interior plus solid boxes inside.
struct SyntheticScene {
    Vec3 interior_min = Vec3::Zero(); ///< free space of the room
    Vec3 interior_max = Vec3::Ones();
    double shell_thickness = 0.08;
    std::vector<SceneBox> boxes;

    Vec3 outer_min() const { return interior_min - Vec3::Constant(shell_thickness); }
    Vec3 outer_max() const { return interior_max + Vec3::Constant(shell_thickness); }

    /// Boxes must lie inside the interior and carry ids in 1..num_classes-1.
    void validate(std::size_t num_classes) const;
};

struct RayHit {
    double distance = 0.0;
    int axis = 0; ///< 0/1/2 for x/y/z faces
    int side = 0; ///< -1 min face, +1 max face
};

/// Nearest positive hit of a ray with the faces of an axis-aligned box
/// (works from inside and outside).  Intersects the six face planes and
/// keeps hits that land on the face rectangle.
std::optional<RayHit> intersect_box_faces(const Vec3 &origin, const Vec3 &dir,
                                          const Vec3 &box_min, const Vec3 &box_max);

struct RenderedFrame {
    DepthMap depth;
    ClassMap classes;
};

/// Ray-distance depth plus hit class per pixel (pixel centers at u + 1/2).
/// Pixels whose ray hits nothing are NaN / class 0.
RenderedFrame render_depth(const SyntheticScene &scene, const CameraModel &cam);

/// Label of the scene at point p: smallest box containing it, else the
/// shell class (floor below, ceiling above, wall otherwise), else empty.
int scene_label_at(const SyntheticScene &scene, const Vec3 &p);

/// Voxel labels from the scene evaluated at voxel centers; scores are 1 for
/// occupied voxels and 0 elsewhere.
OccupancyGrid oracle_occupancy(const SyntheticScene &scene, const GridSpec &spec);

struct SceneGenOptions {
    int min_boxes = 2;
    int max_boxes = 4;
    double shell_thickness = 0.08;
    /// Faces sit this far inside the voxel-aligned footprint so no voxel
    /// center falls on a surface.
    double inset = 0.02;
    /// Box depth along x in voxels.
    int min_depth = 6;
    int max_depth = 6;
};

/// Seeded room filling `spec` exactly: the shell's outer faces lie on the grid
/// boundary and it covers the centers of the outermost voxel layer.  Boxes
/// stand on the floor against the x-max wall.  Every surface is inset
/// from a voxel boundary.
SyntheticScene generate_room_scene(std::uint64_t seed, const GridSpec &spec,
                                   const SceneGenOptions &options = {});

/// Camera-to-world pose looking from eye towards target, image y pointing
/// along -up.
RigidTransform look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up = Vec3::UnitZ());

/// Camera near the x-min wall at chest height, looking across the room
/// towards the far wall and slightly down.
CameraModel default_room_camera(const GridSpec &spec, int width = 800, int height = 600,
                                double hfov = 1.2217304763960306);

/// Two cameras at the room center looking in opposite directions along x;
/// each sees roughly one half of the room.
std::array<CameraModel, 2> half_view_cameras(const GridSpec &spec, int width = 800,
                                             int height = 600, double hfov = 1.2217304763960306);

/// Pinhole intrinsics from a horizontal field of view (radians), square
/// pixels, principal point at the image center.
CameraModel make_camera(int width, int height, double hfov, const RigidTransform &pose);

} // namespace gsocc
