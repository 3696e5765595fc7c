#include "gsocc/splatting.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace gsocc {

namespace {

// Slack on index bounds so voxel centers exactly on the cutoff box survive
// rounding.
constexpr double kIndexSlack = 1e-9;

struct PreparedGaussian {
    Vec3 mean;
    Mat3 precision;
    double opacity;
    std::vector<double> probs;
    VoxelRange range;
};

void check_inputs(const GaussianSet &set, const GridSpec &spec) {
    spec.validate();
    if (set.frame() != Frame::kWorld) {
        throw Error(ErrorCode::kFrameMismatch, "splatting requires a world-frame set");
    }
    if (set.num_classes() != spec.num_classes) {
        throw Error(ErrorCode::kClassCountMismatch, "set and grid disagree on class count");
    }
}

void splat_slab(const std::vector<PreparedGaussian> &prepared, const GridSpec &spec, int k_begin,
                int k_end, std::vector<double> &keep, std::vector<double> &masses) {
    const std::size_t nc = spec.num_classes;
    for (const auto &pg : prepared) {
        const VoxelRange &r = pg.range;
        const int k0 = std::max(r.lo[2], k_begin);
        const int k1 = std::min(r.hi[2], k_end - 1);
        for (int k = k0; k <= k1; ++k) {
            for (int j = r.lo[1]; j <= r.hi[1]; ++j) {
                for (int i = r.lo[0]; i <= r.hi[0]; ++i) {
                    const Vec3 d = spec.voxel_center(i, j, k) - pg.mean;
                    const double m2 = d.dot(pg.precision * d);
                    if (m2 > kCutoffMahalanobisSq) {
                        continue;
                    }
                    const double w = pg.opacity * std::exp(-0.5 * m2);
                    const std::size_t idx = spec.linear_index(i, j, k);
                    keep[idx] *= (1.0 - w);
                    double *m = masses.data() + idx * nc;
                    for (std::size_t c = 0; c < nc; ++c) {
                        m[c] += w * pg.probs[c];
                    }
                }
            }
        }
    }
}

} // namespace

void GridSpec::validate() const {
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) {
        throw Error(ErrorCode::kInvalidInput, "grid dims must be at least 1");
    }
    if (!(voxel_size > 0.0 && std::isfinite(voxel_size))) {
        throw Error(ErrorCode::kInvalidInput, "voxel size must be positive");
    }
    if (!origin.allFinite()) {
        throw Error(ErrorCode::kInvalidInput, "grid origin must be finite");
    }
    if (num_classes < 2 || num_classes > 256) {
        throw Error(ErrorCode::kInvalidInput, "grid class count must lie in 2..256");
    }
}

bool GridSpec::operator==(const GridSpec &other) const {
    return dims == other.dims && voxel_size == other.voxel_size && origin == other.origin &&
           num_classes == other.num_classes;
}

GridSpec scene_grid_spec(const Vec3 &min, const Vec3 &max, double voxel_size,
                         std::size_t num_classes) {
    GridSpec spec;
    spec.voxel_size = voxel_size;
    spec.origin = min;
    spec.num_classes = num_classes;
    for (int a = 0; a < 3; ++a) {
        const double l = max[a] - min[a];
        // ceil with a relative tolerance so exact multiples don't gain a voxel
        spec.dims[a] = std::max(1, static_cast<int>(std::ceil(l / voxel_size - 1e-9)));
    }
    spec.validate();
    return spec;
}

OccupancyGrid::OccupancyGrid(const GridSpec &s)
    : spec(s), labels(s.voxel_count(), 0), scores(s.voxel_count(), 0.0) {}

std::size_t OccupancyGrid::occupied_count() const {
    return static_cast<std::size_t>(
        std::count_if(labels.begin(), labels.end(), [](std::uint8_t l) { return l != 0; }));
}

std::size_t VoxelRange::count() const {
    if (empty()) {
        return 0;
    }
    return static_cast<std::size_t>(hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) * (hi[2] - lo[2] + 1);
}

VoxelRange neighbor_cull(const GaussianPrimitive &g, const GridSpec &spec) {
    const Mat3 sigma = covariance(g);
    VoxelRange r;
    for (int a = 0; a < 3; ++a) {
        const double half = kCutoffMahalanobis * std::sqrt(sigma(a, a));
        const double lo = (g.mean[a] - half - spec.origin[a]) / spec.voxel_size - 0.5;
        const double hi = (g.mean[a] + half - spec.origin[a]) / spec.voxel_size - 0.5;
        const double top = spec.dims[a] - 1;
        const double clo = std::clamp(std::ceil(lo - kIndexSlack), 0.0, top + 1.0);
        const double chi = std::clamp(std::floor(hi + kIndexSlack), -1.0, top);
        r.lo[a] = static_cast<int>(clo);
        r.hi[a] = static_cast<int>(chi);
    }
    if (r.empty()) {
        return VoxelRange{};
    }
    return r;
}

int classify_voxel(double score, std::span<const double> masses, double theta_occ) {
    if (!(score >= theta_occ) || masses.size() < 2) {
        return 0;
    }
    std::size_t best = 1;
    for (std::size_t c = 2; c < masses.size(); ++c) {
        if (masses[c] > masses[best]) {
            best = c;
        }
    }
    return static_cast<int>(best);
}

OccupancyGrid splat(const GaussianSet &set, const GridSpec &spec, const SplatOptions &options) {
    check_inputs(set, spec);

    std::vector<PreparedGaussian> prepared;
    prepared.reserve(set.size());
    for (const auto &g : set) {
        VoxelRange range = neighbor_cull(g, spec);
        if (range.empty() || g.opacity <= 0.0) {
            continue;
        }
        prepared.push_back({g.mean, inverse_covariance(g), g.opacity, softmax(g.logits), range});
    }

    const std::size_t nvox = spec.voxel_count();
    const std::size_t nc = spec.num_classes;
    std::vector<double> keep(nvox, 1.0);
    std::vector<double> masses(nvox * nc, 0.0);

    // Each worker owns a disjoint z-slab and walks the primitives in set
    // order, so per-voxel accumulation order never depends on thread count.
    const int threads = std::clamp(options.threads, 1, spec.dims[2]);
    if (threads == 1) {
        splat_slab(prepared, spec, 0, spec.dims[2], keep, masses);
    } else {
        std::vector<std::jthread> workers;
        workers.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            const int k0 = spec.dims[2] * t / threads;
            const int k1 = spec.dims[2] * (t + 1) / threads;
            workers.emplace_back([&, k0, k1] { splat_slab(prepared, spec, k0, k1, keep, masses); });
        }
    }

    OccupancyGrid grid(spec);
    for (std::size_t v = 0; v < nvox; ++v) {
        const double score = std::clamp(1.0 - keep[v], 0.0, 1.0);
        grid.scores[v] = score;
        grid.labels[v] = static_cast<std::uint8_t>(classify_voxel(
            score, std::span<const double>(masses.data() + v * nc, nc), options.theta_occ));
    }
    if (options.keep_masses) {
        grid.masses = std::move(masses);
    }
    return grid;
}

} // namespace gsocc
