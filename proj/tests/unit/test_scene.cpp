#include "gsocc/scene.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace gsocc;
using namespace gsocc::testing;

namespace {

SyntheticScene single_box_scene() {
    SyntheticScene s;
    s.interior_min = Vec3(0.08, 0.08, 0.08);
    s.interior_max = Vec3(1.52, 1.52, 1.52);
    s.shell_thickness = 0.08;
    return s;
}

} // namespace

TEST(IntersectBoxFaces, AgreesWithSlabOracle) {
    Rng rng(71);
    for (int t = 0; t < 5000; ++t) {
        const Vec3 lo(uniform(rng, -1, 0), uniform(rng, -1, 0), uniform(rng, -1, 0));
        const Vec3 hi = lo + Vec3(uniform(rng, 0.1, 2), uniform(rng, 0.1, 2), uniform(rng, 0.1, 2));
        const Vec3 o(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3));
        const Vec3 d = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)).normalized();
        const auto a = intersect_box_faces(o, d, lo, hi);
        const auto b = slab_hit(o, d, lo, hi);
        ASSERT_EQ(a.has_value(), b.has_value());
        if (a) EXPECT_NEAR(a->distance, *b, 1e-9);
    }
}

TEST(RenderDepth, WallThroughPrincipalPixel) {
    // Camera at the origin of a large room facing a wall 3 m ahead along z.
    SyntheticScene s;
    s.interior_min = Vec3(-5, -5, -5);
    s.interior_max = Vec3(5, 5, 3);
    const CameraModel cam(100, 100, 50.5, 50.5, 101, 101);
    const auto frame = render_depth(s, cam);
    EXPECT_EQ(frame.depth.at(50, 50), 3.0);
    EXPECT_EQ(frame.classes.at(50, 50), kCeiling);
}

TEST(RenderDepth, MissIsInvalid) {
    SyntheticScene s = single_box_scene();
    // Outside the room looking away from it.
    const auto cam = make_camera(16, 12, 1.0, look_at(Vec3(5, 0.8, 0.8), Vec3(9, 0.8, 0.8)));
    const auto frame = render_depth(s, cam);
    for (double d : frame.depth.values) EXPECT_FALSE(DepthMap::is_valid(d));
    for (auto c : frame.classes.ids) EXPECT_EQ(c, 0);
}

TEST(RenderDepth, MatchesSlabOracleOnRandomScenes) {
    Rng rng(72);
    const GridSpec spec;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto scene = generate_room_scene(seed, spec);
        const Vec3 eye(uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 4.3), uniform(rng, 0.5, 2.0));
        const Vec3 target(uniform(rng, 3, 4.5), uniform(rng, 0.3, 4.5), uniform(rng, 0.1, 1.5));
        const auto cam = make_camera(80, 60, 1.3, look_at(eye, target));
        const auto frame = render_depth(scene, cam);
        for (int v = 0; v < 60; ++v) {
            for (int u = 0; u < 80; ++u) {
                const Vec3 d = cam.pose().rotation * ray_direction(cam, {u + 0.5, v + 0.5});
                double best = *slab_hit(eye, d, scene.interior_min, scene.interior_max);
                for (const auto &b : scene.boxes) {
                    if (auto t = slab_hit(eye, d, b.min, b.max)) best = std::min(best, *t);
                }
                EXPECT_NEAR(frame.depth.at(u, v), best, 1e-9);
            }
        }
    }
}

TEST(OracleOccupancy, BoxOverTwoByTwoByTwoVoxels) {
    SyntheticScene s = single_box_scene();
    s.boxes.push_back({Vec3(0.40, 0.40, 0.40), Vec3(0.56, 0.56, 0.56), kChair});
    GridSpec spec;
    spec.dims = {20, 20, 20};
    const auto grid = oracle_occupancy(s, spec);
    std::size_t chairs = 0;
    for (auto l : grid.labels) chairs += l == kChair;
    EXPECT_EQ(chairs, 8u);
}

TEST(OracleOccupancy, EmptyInterior) {
    const SyntheticScene s = single_box_scene();
    GridSpec spec;
    spec.dims = {20, 20, 20};
    const auto grid = oracle_occupancy(s, spec);
    for (int k = 1; k < 19; ++k)
        for (int j = 1; j < 19; ++j)
            for (int i = 1; i < 19; ++i) EXPECT_EQ(grid.labels[spec.linear_index(i, j, k)], 0);
    EXPECT_EQ(grid.labels[spec.linear_index(5, 5, 0)], kFloor);
    EXPECT_EQ(grid.labels[spec.linear_index(5, 5, 19)], kCeiling);
    EXPECT_EQ(grid.labels[spec.linear_index(0, 5, 5)], kWall);
}

TEST(OracleOccupancy, InnerBoxWins) {
    SyntheticScene s = single_box_scene();
    s.boxes.push_back({Vec3(0.2, 0.2, 0.2), Vec3(1.0, 1.0, 1.0), kBed});
    s.boxes.push_back({Vec3(0.4, 0.4, 0.4), Vec3(0.6, 0.6, 0.6), kTv});
    EXPECT_EQ(scene_label_at(s, Vec3(0.5, 0.5, 0.5)), kTv);
    EXPECT_EQ(scene_label_at(s, Vec3(0.3, 0.3, 0.3)), kBed);
    EXPECT_EQ(scene_label_at(s, Vec3(1.3, 1.3, 1.3)), kEmpty);
    EXPECT_EQ(scene_label_at(s, Vec3(3, 3, 3)), kEmpty);
}

TEST(GenerateRoomScene, DeterministicAndValid) {
    const GridSpec spec;
    const auto a = generate_room_scene(9, spec);
    const auto b = generate_room_scene(9, spec);
    ASSERT_EQ(a.boxes.size(), b.boxes.size());
    EXPECT_GE(a.boxes.size(), 2u);
    for (std::size_t i = 0; i < a.boxes.size(); ++i) {
        EXPECT_EQ(a.boxes[i].min, b.boxes[i].min);
        EXPECT_EQ(a.boxes[i].label, b.boxes[i].label);
    }
    EXPECT_NO_THROW(a.validate(spec.num_classes));
    // No voxel center lies on a surface.
    for (const auto &box : a.boxes) {
        for (int axis = 0; axis < 3; ++axis) {
            for (double f : {box.min[axis], box.max[axis]}) {
                const double cells = (f - spec.origin[axis]) / spec.voxel_size - 0.5;
                EXPECT_GT(std::abs(cells - std::round(cells)), 0.1);
            }
        }
    }
}

TEST(GenerateRoomScene, RejectsTinyGrid) {
    GridSpec spec;
    spec.dims = {6, 60, 36};
    EXPECT_THROW(generate_room_scene(0, spec), Error);
}

TEST(LookAt, ProperRotation) {
    const auto pose = look_at(Vec3(0, 0, 1), Vec3(3, 1, 0.5));
    EXPECT_NEAR(pose.rotation.determinant(), 1.0, 1e-12);
    EXPECT_TRUE((pose.rotation.transpose() * pose.rotation).isApprox(Mat3::Identity(), 1e-12));
    EXPECT_TRUE(pose.rotation.col(2).isApprox(Vec3(3, 1, -0.5).normalized(), 1e-12));
    EXPECT_LT(pose.rotation.col(1).z(), 0.0); // image down points down
    EXPECT_THROW(look_at(Vec3::Zero(), Vec3(0, 0, 1)), Error);
}
