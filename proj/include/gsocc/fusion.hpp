#pragma once

#include "gsocc/gaussian.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace gsocc {

/// Uniform-grid hash over points.  Each id lives in exactly one cell.
class SpatialHash {
public:
    explicit SpatialHash(double cell_size);

    double cell_size() const { return mCellSize; }
    std::size_t size() const { return mCellOf.size(); }

    void insert(std::uint32_t id, const Vec3 &p);
    void move(std::uint32_t id, const Vec3 &p);
    void clear();

    /// Ids whose point is within `radius` (closed ball) of q.  `points` maps
    /// id to position.
    void query(const Vec3 &q, double radius, std::span<const Vec3> points,
               std::vector<std::uint32_t> &out) const;

    /// Ids stored in the cell containing p.
    std::vector<std::uint32_t> cell_members(const Vec3 &p) const;

    struct CellKey {
        std::int64_t x, y, z;
        bool operator==(const CellKey &) const = default;
    };

    CellKey key_of(const Vec3 &p) const;

private:
    struct CellKeyHash {
        std::size_t operator()(const CellKey &k) const noexcept;
    };

    double mCellSize;
    std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> mCells;
    std::vector<CellKey> mCellOf;
};

struct FusionConfig {
    double epsilon = 0.08; ///< match radius (meters)
    double gamma = 0.4;    ///< memory weight, in (0, 1)

    void validate() const;
};

struct FusionStats {
    std::size_t matched = 0;
    std::size_t inserted = 0;
};

/// World-frame memory of primitives with a spatial index over the means.
/// Single writer: fuse_frame needs exclusive access; const queries may run
/// concurrently between updates.
class GaussianMemoryBank {
public:
    GaussianMemoryBank(std::size_t num_classes, double cell_size = 0.08);

    std::size_t size() const { return mGaussians.size(); }
    std::size_t num_classes() const { return mNumClasses; }
    std::size_t frames_fused() const { return mFrameCounter; }
    double cell_size() const { return mIndex.cell_size(); }

    const GaussianPrimitive &operator[](std::size_t i) const { return mGaussians[i]; }
    std::span<const Vec3> means() const { return mMeans; }

    /// Snapshot as a world-frame set.
    GaussianSet to_set() const;

    /// Members with ||mu - q|| <= eps.
    std::vector<std::uint32_t> radius_neighbors(const Vec3 &q, double eps) const;

    /// Nearest member within eps, or -1.
    std::int64_t nearest_within(const Vec3 &q, double eps) const;

    void insert(GaussianPrimitive g);
    void replace(std::uint32_t id, GaussianPrimitive g);

    void advance_frame() { ++mFrameCounter; }

    const SpatialHash &index() const { return mIndex; }

private:
    std::size_t mNumClasses;
    std::vector<GaussianPrimitive> mGaussians;
    std::vector<Vec3> mMeans;
    SpatialHash mIndex;
    std::size_t mFrameCounter = 0;
};

/// Confidence- and time-weighted average of a memory anchor with its matched
/// incoming primitives:
///   theta = (gamma p_m theta_m + (1-gamma) sum_j p_j theta_j)
///         / (gamma p_m + (1-gamma) sum_j p_j)
/// for theta in {mean, covariance, opacity, logits}; p is top-1 confidence.
/// The averaged covariance is re-factored into (scale, rotation).
GaussianPrimitive fuse_attributes(const GaussianPrimitive &anchor,
                                  std::span<const GaussianPrimitive *const> incoming,
                                  double gamma);

/// Eigen-decomposes a symmetric covariance into per-axis scales (floored)
/// and a proper rotation.
void factor_covariance(const Mat3 &sigma, Vec3 &scale, Quat &rotation);

/// Matches every incoming primitive to its nearest memory anchor within
/// epsilon (bank state before this frame), fuses each matched group into its
/// anchor and inserts the unmatched ones.  Throws kFrameMismatch for
/// camera-frame input and kClassCountMismatch on class-count disagreement.
FusionStats fuse_frame(GaussianMemoryBank &bank, const GaussianSet &incoming,
                       const FusionConfig &cfg);

} // namespace gsocc
