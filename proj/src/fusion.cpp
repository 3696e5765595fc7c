#include "gsocc/fusion.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gsocc {

SpatialHash::SpatialHash(double cell_size) : mCellSize(cell_size) {
    if (!(cell_size > 0.0 && std::isfinite(cell_size))) {
        throw Error(ErrorCode::kInvalidInput, "hash cell size must be positive");
    }
}

std::size_t SpatialHash::CellKeyHash::operator()(const CellKey &k) const noexcept {
    // Teschner et al. style prime mixing.
    const auto x = static_cast<std::uint64_t>(k.x) * 73856093ULL;
    const auto y = static_cast<std::uint64_t>(k.y) * 19349663ULL;
    const auto z = static_cast<std::uint64_t>(k.z) * 83492791ULL;
    return static_cast<std::size_t>(x ^ y ^ z);
}

SpatialHash::CellKey SpatialHash::key_of(const Vec3 &p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / mCellSize)),
            static_cast<std::int64_t>(std::floor(p.y() / mCellSize)),
            static_cast<std::int64_t>(std::floor(p.z() / mCellSize))};
}

void SpatialHash::insert(std::uint32_t id, const Vec3 &p) {
    if (id != mCellOf.size()) {
        throw Error(ErrorCode::kInvalidInput, "spatial hash ids must be inserted densely");
    }
    const CellKey key = key_of(p);
    mCells[key].push_back(id);
    mCellOf.push_back(key);
}

void SpatialHash::move(std::uint32_t id, const Vec3 &p) {
    const CellKey key = key_of(p);
    CellKey &old = mCellOf.at(id);
    if (old == key) {
        return;
    }
    auto it = mCells.find(old);
    auto &members = it->second;
    members.erase(std::find(members.begin(), members.end(), id));
    if (members.empty()) {
        mCells.erase(it);
    }
    mCells[key].push_back(id);
    old = key;
}

void SpatialHash::clear() {
    mCells.clear();
    mCellOf.clear();
}

void SpatialHash::query(const Vec3 &q, double radius, std::span<const Vec3> points,
                        std::vector<std::uint32_t> &out) const {
    out.clear();
    if (!(radius >= 0.0) || mCells.empty()) {
        return;
    }
    const CellKey c = key_of(q);
    const auto reach = static_cast<std::int64_t>(std::ceil(radius / mCellSize));
    const double r2 = radius * radius;
    for (std::int64_t dz = -reach; dz <= reach; ++dz) {
        for (std::int64_t dy = -reach; dy <= reach; ++dy) {
            for (std::int64_t dx = -reach; dx <= reach; ++dx) {
                auto it = mCells.find({c.x + dx, c.y + dy, c.z + dz});
                if (it == mCells.end()) {
                    continue;
                }
                for (std::uint32_t id : it->second) {
                    if ((points[id] - q).squaredNorm() <= r2) {
                        out.push_back(id);
                    }
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
}

std::vector<std::uint32_t> SpatialHash::cell_members(const Vec3 &p) const {
    auto it = mCells.find(key_of(p));
    if (it == mCells.end()) {
        return {};
    }
    auto members = it->second;
    std::sort(members.begin(), members.end());
    return members;
}

void FusionConfig::validate() const {
    if (!(epsilon > 0.0 && std::isfinite(epsilon))) {
        throw Error(ErrorCode::kInvalidInput, "fusion epsilon must be positive");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw Error(ErrorCode::kInvalidInput, "fusion gamma must lie in (0, 1)");
    }
}

GaussianMemoryBank::GaussianMemoryBank(std::size_t num_classes, double cell_size)
    : mNumClasses(num_classes), mIndex(cell_size) {
    if (num_classes == 0) {
        throw Error(ErrorCode::kInvalidInput, "memory bank needs at least one class");
    }
}

GaussianSet GaussianMemoryBank::to_set() const {
    return GaussianSet(mNumClasses, Frame::kWorld, mGaussians);
}

std::vector<std::uint32_t> GaussianMemoryBank::radius_neighbors(const Vec3 &q, double eps) const {
    if (!(eps > 0.0)) {
        throw Error(ErrorCode::kInvalidInput, "search radius must be positive");
    }
    std::vector<std::uint32_t> out;
    mIndex.query(q, eps, mMeans, out);
    return out;
}

std::int64_t GaussianMemoryBank::nearest_within(const Vec3 &q, double eps) const {
    std::vector<std::uint32_t> candidates;
    mIndex.query(q, eps, mMeans, candidates);
    std::int64_t best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    // candidates are sorted, so strict < keeps the lowest id on ties
    for (std::uint32_t id : candidates) {
        const double d2 = (mMeans[id] - q).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = id;
        }
    }
    return best;
}

void GaussianMemoryBank::insert(GaussianPrimitive g) {
    if (g.num_classes() != mNumClasses) {
        throw Error(ErrorCode::kClassCountMismatch, "gaussian class count differs from bank");
    }
    const auto id = static_cast<std::uint32_t>(mGaussians.size());
    mIndex.insert(id, g.mean);
    mMeans.push_back(g.mean);
    mGaussians.push_back(std::move(g));
}

void GaussianMemoryBank::replace(std::uint32_t id, GaussianPrimitive g) {
    if (g.num_classes() != mNumClasses) {
        throw Error(ErrorCode::kClassCountMismatch, "gaussian class count differs from bank");
    }
    mIndex.move(id, g.mean);
    mMeans.at(id) = g.mean;
    mGaussians.at(id) = std::move(g);
}

void factor_covariance(const Mat3 &sigma, Vec3 &scale, Quat &rotation) {
    const Mat3 sym = 0.5 * (sigma + sigma.transpose());
    Eigen::SelfAdjointEigenSolver<Mat3> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::kDegenerateGaussian, "covariance eigen-decomposition failed");
    }
    Mat3 axes = solver.eigenvectors();
    if (axes.determinant() < 0.0) {
        axes.col(2) = -axes.col(2);
    }
    const Vec3 values = solver.eigenvalues();
    for (int i = 0; i < 3; ++i) {
        scale[i] = std::sqrt(std::max(values[i], kScaleFloor * kScaleFloor));
    }
    rotation = Quat(axes).normalized();
}

GaussianPrimitive fuse_attributes(const GaussianPrimitive &anchor,
                                  std::span<const GaussianPrimitive *const> incoming,
                                  double gamma) {
    const std::size_t nc = anchor.num_classes();
    double weight = gamma * top1_confidence(anchor);
    Vec3 mean = weight * anchor.mean;
    Mat3 sigma = weight * covariance(anchor);
    double opacity = weight * anchor.opacity;
    std::vector<double> logits(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        logits[c] = weight * anchor.logits[c];
    }

    for (const GaussianPrimitive *g : incoming) {
        if (g->num_classes() != nc) {
            throw Error(ErrorCode::kClassCountMismatch, "fused gaussians disagree on class count");
        }
        const double w = (1.0 - gamma) * top1_confidence(*g);
        weight += w;
        mean += w * g->mean;
        sigma += w * covariance(*g);
        opacity += w * g->opacity;
        for (std::size_t c = 0; c < nc; ++c) {
            logits[c] += w * g->logits[c];
        }
    }

    GaussianPrimitive out;
    out.mean = mean / weight;
    factor_covariance(sigma / weight, out.scale, out.rotation);
    out.opacity = std::clamp(opacity / weight, 0.0, 1.0);
    for (auto &c : logits) {
        c /= weight;
    }
    out.logits = std::move(logits);
    return out;
}

FusionStats fuse_frame(GaussianMemoryBank &bank, const GaussianSet &incoming,
                       const FusionConfig &cfg) {
    cfg.validate();
    if (incoming.frame() != Frame::kWorld) {
        throw Error(ErrorCode::kFrameMismatch, "fusion requires world-frame gaussians");
    }
    if (incoming.num_classes() != bank.num_classes()) {
        throw Error(ErrorCode::kClassCountMismatch, "incoming set and bank disagree on class count");
    }

    // Match against the bank as it was before this frame.
    std::vector<std::int64_t> anchor_of(incoming.size());
    for (std::size_t j = 0; j < incoming.size(); ++j) {
        anchor_of[j] = bank.nearest_within(incoming[j].mean, cfg.epsilon);
    }

    std::vector<std::size_t> order(incoming.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return anchor_of[a] < anchor_of[b]; });

    FusionStats stats;
    std::vector<const GaussianPrimitive *> group;
    std::size_t pos = 0;
    while (pos < order.size() && anchor_of[order[pos]] < 0) {
        ++pos;
    }
    const std::size_t first_matched = pos;
    while (pos < order.size()) {
        const std::int64_t anchor = anchor_of[order[pos]];
        group.clear();
        while (pos < order.size() && anchor_of[order[pos]] == anchor) {
            group.push_back(&incoming[order[pos]]);
            ++pos;
        }
        const auto id = static_cast<std::uint32_t>(anchor);
        bank.replace(id, fuse_attributes(bank[id], group, cfg.gamma));
        stats.matched += group.size();
    }
    // Unmatched primitives keep their incoming order.
    for (std::size_t i = 0; i < first_matched; ++i) {
        bank.insert(incoming[order[i]]);
        ++stats.inserted;
    }
    bank.advance_frame();
    return stats;
}

} // namespace gsocc
