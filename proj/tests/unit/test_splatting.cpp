#include "gsocc/splatting.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace gsocc;
using namespace gsocc::testing;

namespace {

GridSpec small_grid(int n = 16, std::size_t nc = 5) {
    GridSpec spec;
    spec.dims = {n, n, n};
    spec.voxel_size = 0.1;
    spec.origin = Vec3(-0.8, -0.8, -0.8);
    spec.num_classes = nc;
    return spec;
}

} // namespace

TEST(GridSpec, GeometryHelpers) {
    const GridSpec spec;
    EXPECT_EQ(spec.voxel_count(), 60u * 60u * 36u);
    EXPECT_EQ(spec.linear_index(1, 0, 0), 1u);
    EXPECT_EQ(spec.linear_index(0, 1, 0), 60u);
    EXPECT_EQ(spec.linear_index(0, 0, 1), 3600u);
    EXPECT_TRUE(spec.voxel_center(0, 0, 0).isApprox(Vec3::Constant(0.04)));
    EXPECT_TRUE(spec.extent().isApprox(Vec3(4.8, 4.8, 2.88)));
}

TEST(GridSpec, SceneFormula) {
    const auto spec = scene_grid_spec(Vec3::Zero(), Vec3(4.8, 3.85, 2.4), 0.08, 12);
    EXPECT_EQ(spec.dims, (std::array<int, 3>{60, 49, 30}));
    GridSpec bad;
    bad.num_classes = 1;
    EXPECT_THROW(bad.validate(), Error);
    bad = GridSpec{};
    bad.voxel_size = 0;
    EXPECT_THROW(bad.validate(), Error);
}

TEST(NeighborCull, IsotropicAtVoxelCenter) {
    const GridSpec spec;
    const Vec3 c = spec.voxel_center(30, 30, 18);
    const auto g = GaussianPrimitive::create(c, Vec3::Constant(0.08), Quat::Identity(), 1, std::vector<double>(12, 0));
    const auto r = neighbor_cull(g, spec);
    for (int a = 0; a < 3; ++a) EXPECT_EQ(r.hi[a] - r.lo[a] + 1, 7);
    EXPECT_EQ(r.lo[0], 27);
    EXPECT_EQ(r.hi[2], 21);
}

TEST(NeighborCull, FarOutsideIsEmpty) {
    const GridSpec spec;
    const auto g = GaussianPrimitive::create(Vec3(14.8, 2, 1), Vec3::Constant(0.1), Quat::Identity(), 1,
                                             std::vector<double>(12, 0));
    EXPECT_TRUE(neighbor_cull(g, spec).empty());
    EXPECT_EQ(neighbor_cull(g, spec).count(), 0u);
}

TEST(NeighborCull, CoversEveryContributingVoxel) {
    Rng rng(31);
    const GridSpec spec = small_grid();
    for (int t = 0; t < 100; ++t) {
        const auto g = random_gaussian(rng, spec.origin - Vec3::Constant(0.3),
                                       spec.origin + spec.extent() + Vec3::Constant(0.3), 5, 0.02, 0.4);
        const auto r = neighbor_cull(g, spec);
        const Mat3 prec = dense_covariance(g).fullPivLu().inverse();
        for (int k = 0; k < 16; ++k) {
            for (int j = 0; j < 16; ++j) {
                for (int i = 0; i < 16; ++i) {
                    const Vec3 d = spec.voxel_center(i, j, k) - g.mean;
                    if (std::exp(-0.5 * d.dot(prec * d)) >= std::exp(-4.5)) {
                        EXPECT_TRUE(r.contains(i, j, k)) << i << ' ' << j << ' ' << k;
                    }
                }
            }
        }
    }
}

TEST(ClassifyVoxel, Rules) {
    const std::vector<double> none(12, 0.0);
    EXPECT_EQ(classify_voxel(0.0, none), 0);
    std::vector<double> five(12, 0.0);
    five[5] = 0.9;
    EXPECT_EQ(classify_voxel(0.9, five), 5);
    EXPECT_EQ(classify_voxel(0.49, five), 0);
    EXPECT_EQ(classify_voxel(0.5, five), 5);
    std::vector<double> tie(12, 0.0);
    tie[3] = tie[7] = 0.4;
    EXPECT_EQ(classify_voxel(0.8, tie), 3);
    std::vector<double> empty_heavy(12, 0.0);
    empty_heavy[0] = 10.0;
    empty_heavy[2] = 0.1;
    EXPECT_EQ(classify_voxel(0.8, empty_heavy), 2);
}

TEST(Splat, EmptySet) {
    const GridSpec spec = small_grid(8);
    const auto grid = splat(GaussianSet(5, Frame::kWorld), spec);
    EXPECT_EQ(grid.occupied_count(), 0u);
    for (double s : grid.scores) EXPECT_EQ(s, 0.0);
}

TEST(Splat, SingleGaussianOnVoxelCenter) {
    const GridSpec spec = small_grid(8);
    GaussianSet set(5, Frame::kWorld);
    set.push_back(GaussianPrimitive::create(spec.voxel_center(3, 4, 5), Vec3::Constant(0.01),
                                            Quat::Identity(), 0.9, {0, 0, 0, 2, 1}));
    const auto grid = splat(set, spec);
    const auto idx = spec.linear_index(3, 4, 5);
    EXPECT_DOUBLE_EQ(grid.scores[idx], 0.9);
    EXPECT_EQ(grid.labels[idx], 3);
    EXPECT_EQ(grid.occupied_count(), 1u);
}

TEST(Splat, MatchesBruteForce) {
    Rng rng(32);
    const GridSpec spec = small_grid();
    for (int t = 0; t < 5; ++t) {
        const auto set = random_set(rng, 100, spec);
        const auto fast = splat(set, spec);
        const auto slow = brute_force_splat(set, spec);
        for (std::size_t v = 0; v < spec.voxel_count(); ++v) {
            ASSERT_NEAR(fast.scores[v], slow.scores[v], 1e-6);
            ASSERT_EQ(fast.labels[v], slow.labels[v]);
        }
    }
}

TEST(Splat, ThreadCountDoesNotChangeResult) {
    Rng rng(33);
    const GridSpec spec = small_grid(20);
    const auto set = random_set(rng, 400, spec);
    const auto one = splat(set, spec, {0.5, 1, true});
    for (int threads : {2, 3, 7}) {
        const auto many = splat(set, spec, {0.5, threads, true});
        EXPECT_EQ(one.labels, many.labels);
        EXPECT_EQ(one.scores, many.scores);
        EXPECT_EQ(one.masses, many.masses);
    }
}

TEST(Splat, SuperpositionInvariants) {
    Rng rng(34);
    const GridSpec spec = small_grid(12);
    auto set = random_set(rng, 60, spec);
    const auto base = splat(set, spec);
    for (double s : base.scores) {
        EXPECT_GE(s, 0.0);
        EXPECT_LE(s, 1.0);
    }
    set.push_back(random_gaussian(rng, spec.origin, spec.origin + spec.extent(), 5, 0.05, 0.3));
    const auto more = splat(set, spec);
    for (std::size_t v = 0; v < spec.voxel_count(); ++v) EXPECT_GE(more.scores[v], base.scores[v]);

    std::vector<GaussianPrimitive> shuffled(set.begin(), set.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto perm = splat(GaussianSet(5, Frame::kWorld, shuffled), spec);
    for (std::size_t v = 0; v < spec.voxel_count(); ++v) EXPECT_NEAR(perm.scores[v], more.scores[v], 1e-9);
}

TEST(Splat, KeepsMassesOnRequest) {
    const GridSpec spec = small_grid(4, 3);
    GaussianSet set(3, Frame::kWorld);
    set.push_back(GaussianPrimitive::create(spec.voxel_center(1, 1, 1), Vec3::Constant(0.05),
                                            Quat::Identity(), 0.8, {0, 0, 0}));
    const auto grid = splat(set, spec, {0.5, 1, true});
    ASSERT_EQ(grid.masses.size(), spec.voxel_count() * 3);
    const auto idx = spec.linear_index(1, 1, 1);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(grid.masses[idx * 3 + c], 0.8 / 3.0, 1e-15);
    EXPECT_TRUE(splat(set, spec).masses.empty());
}

TEST(Splat, RejectsMismatches) {
    const GridSpec spec = small_grid(4, 3);
    try {
        splat(GaussianSet(3, Frame::kCamera), spec);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kFrameMismatch);
    }
    try {
        splat(GaussianSet(4, Frame::kWorld), spec);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::kClassCountMismatch);
    }
}

TEST(Splat, PruningBound) {
    Rng rng(35);
    const GridSpec spec = small_grid(12);
    GaussianSet set(5, Frame::kWorld);
    for (int i = 0; i < 300; ++i) {
        auto g = random_gaussian(rng, spec.origin, spec.origin + spec.extent(), 5, 0.05, 0.25);
        if (i % 3 == 0) g.opacity = uniform(rng, 0.0, 0.01);
        set.push_back(g);
    }
    const auto pruned = prune(set, 0.01);
    double removed = 0.0;
    for (const auto &g : set) removed += g.opacity < 0.01 ? g.opacity : 0.0;
    const auto full = splat(set, spec);
    const auto kept = splat(pruned, spec);
    for (std::size_t v = 0; v < spec.voxel_count(); ++v) {
        EXPECT_LE(std::abs(full.scores[v] - kept.scores[v]), removed + 1e-12);
    }
}
