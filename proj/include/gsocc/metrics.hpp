#pragma once

#include "gsocc/camera.hpp"
#include "gsocc/splatting.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gsocc {

inline constexpr double kDefaultNear = 0.01;
inline constexpr double kDefaultFar = 10.0;

/// Voxels whose centers are in front of the camera, project inside the image
/// and lie at ray distance within [near, far].
std::vector<std::uint8_t> frustum_mask(const GridSpec &spec, const CameraModel &cam,
                                       double near = kDefaultNear, double far = kDefaultFar);

struct ConfusionCounts {
    std::size_t num_classes = 0;
    std::vector<std::uint64_t> tp, fp, fn; // indexed by class id, entry 0 unused
    std::uint64_t occ_tp = 0, occ_fp = 0, occ_fn = 0, occ_tn = 0;
    std::uint64_t evaluated = 0;

    explicit ConfusionCounts(std::size_t num_classes = 0);
    ConfusionCounts &operator+=(const ConfusionCounts &other);
};

/// Accumulates counts over voxels with mask != 0 (all voxels when the mask is
/// empty).  Throws kGridMismatch when specs or mask length disagree.
ConfusionCounts confusion(const OccupancyGrid &pred, const OccupancyGrid &gt,
                          std::span<const std::uint8_t> mask = {});

struct MetricReport {
    double iou = 0.0;
    /// IoU per class 1..N_c-1 (index 0 unused); nullopt when the class is
    /// absent from both grids.
    std::vector<std::optional<double>> per_class;
    double miou = 0.0;
    std::size_t classes_evaluated = 0;
};

/// Throws Error(kUndefinedMetric) when no class has support in either grid.
MetricReport iou_miou(const ConfusionCounts &counts);

/// `key = value` lines: iou, miou, then one line per class.
std::string format_report(const MetricReport &report,
                          std::span<const std::string> class_names = {});

/// Names of the 12 indoor classes, index 0 = empty.
std::span<const std::string> default_class_names();

} // namespace gsocc
