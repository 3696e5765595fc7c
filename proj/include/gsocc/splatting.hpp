#pragma once

#include "gsocc/gaussian.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace gsocc {

/// Mahalanobis radius beyond which a primitive contributes nothing.
inline constexpr double kCutoffMahalanobis = 3.0;
inline constexpr double kCutoffMahalanobisSq = kCutoffMahalanobis * kCutoffMahalanobis;

inline constexpr double kDefaultThetaOcc = 0.5;

/// Axis-aligned voxel lattice.  Voxel (i,j,k) has its center at
/// origin + (i+1/2, j+1/2, k+1/2) * voxel_size.
struct GridSpec {
    std::array<int, 3> dims{60, 60, 36};
    double voxel_size = 0.08;
    Vec3 origin = Vec3::Zero();
    std::size_t num_classes = 12;

    void validate() const;

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    /// x fastest, then y, then z.
    std::size_t linear_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
    }
    Vec3 voxel_center(int i, int j, int k) const {
        return origin + voxel_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
    }
    Vec3 extent() const { return voxel_size * Vec3(dims[0], dims[1], dims[2]); }

    bool operator==(const GridSpec &other) const;
};

/// Grid covering [min, max] with ceil(l / voxel_size) voxels per axis.
GridSpec scene_grid_spec(const Vec3 &min, const Vec3 &max, double voxel_size,
                         std::size_t num_classes);

/// Per-voxel class label (0 = empty) and occupancy score in [0, 1].
struct OccupancyGrid {
    GridSpec spec;
    std::vector<std::uint8_t> labels;
    std::vector<double> scores;
    /// Per-class opacity-weighted mass, voxel-major (N_c entries per voxel).
    /// Empty unless requested from splat().
    std::vector<double> masses;

    OccupancyGrid() = default;
    explicit OccupancyGrid(const GridSpec &spec);

    std::size_t occupied_count() const;
};

/// Inclusive voxel index box; empty when any lo > hi.
struct VoxelRange {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{-1, -1, -1};

    bool empty() const { return lo[0] > hi[0] || lo[1] > hi[1] || lo[2] > hi[2]; }
    std::size_t count() const;
    bool contains(int i, int j, int k) const {
        return i >= lo[0] && i <= hi[0] && j >= lo[1] && j <= hi[1] && k >= lo[2] && k <= hi[2];
    }
};

/// Voxels whose centers may lie within Mahalanobis radius 3 of the mean,
/// clipped to the grid.  Uses the exact ellipsoid AABB, 3 * sqrt(Sigma_ii).
VoxelRange neighbor_cull(const GaussianPrimitive &g, const GridSpec &spec);

/// 0 when score < theta_occ, else the argmax over classes 1..N_c-1 (lowest
/// id wins ties).
int classify_voxel(double score, std::span<const double> masses,
                   double theta_occ = kDefaultThetaOcc);

struct SplatOptions {
    double theta_occ = kDefaultThetaOcc;
    int threads = 1;
    bool keep_masses = false;
};

/// Probabilistic superposition: alpha(p) = 1 - prod_i (1 - a_i g_i(p)) with
/// g_i cut off beyond Mahalanobis 3, per-class mass sum_i a_i g_i(p)
/// softmax(c_i), then classify_voxel.  Output is identical for any thread
/// count.  Throws kFrameMismatch for camera-frame sets and
/// kClassCountMismatch when class counts disagree.
OccupancyGrid splat(const GaussianSet &set, const GridSpec &spec,
                    const SplatOptions &options = {});

} // namespace gsocc
