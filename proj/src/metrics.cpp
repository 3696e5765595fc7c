#include "gsocc/metrics.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace gsocc {

std::vector<std::uint8_t> frustum_mask(const GridSpec &spec, const CameraModel &cam, double near,
                                       double far) {
    spec.validate();
    if (!(near > 0.0 && far > near)) {
        throw Error(ErrorCode::kInvalidInput, "frustum needs 0 < near < far");
    }
    std::vector<std::uint8_t> mask(spec.voxel_count(), 0);
    const RigidTransform &pose = cam.pose();
    for (int k = 0; k < spec.dims[2]; ++k) {
        for (int j = 0; j < spec.dims[1]; ++j) {
            for (int i = 0; i < spec.dims[0]; ++i) {
                const Vec3 p = pose.apply_inverse(spec.voxel_center(i, j, k));
                if (!(p.z() > 0.0)) {
                    continue;
                }
                const Projection proj = project(cam, p);
                if (cam.in_image(proj.pixel) && proj.distance >= near && proj.distance <= far) {
                    mask[spec.linear_index(i, j, k)] = 1;
                }
            }
        }
    }
    return mask;
}

ConfusionCounts::ConfusionCounts(std::size_t n)
    : num_classes(n), tp(n, 0), fp(n, 0), fn(n, 0) {}

ConfusionCounts &ConfusionCounts::operator+=(const ConfusionCounts &other) {
    if (other.num_classes != num_classes) {
        throw Error(ErrorCode::kClassCountMismatch, "confusion counts disagree on class count");
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        tp[c] += other.tp[c];
        fp[c] += other.fp[c];
        fn[c] += other.fn[c];
    }
    occ_tp += other.occ_tp;
    occ_fp += other.occ_fp;
    occ_fn += other.occ_fn;
    occ_tn += other.occ_tn;
    evaluated += other.evaluated;
    return *this;
}

ConfusionCounts confusion(const OccupancyGrid &pred, const OccupancyGrid &gt,
                          std::span<const std::uint8_t> mask) {
    if (!(pred.spec == gt.spec)) {
        throw Error(ErrorCode::kGridMismatch, "prediction and ground truth grids differ");
    }
    const std::size_t n = pred.spec.voxel_count();
    if (pred.labels.size() != n || gt.labels.size() != n) {
        throw Error(ErrorCode::kGridMismatch, "grid label arrays have the wrong length");
    }
    if (!mask.empty() && mask.size() != n) {
        throw Error(ErrorCode::kGridMismatch, "mask length differs from voxel count");
    }
    const std::size_t nc = pred.spec.num_classes;
    ConfusionCounts counts(nc);
    for (std::size_t v = 0; v < n; ++v) {
        if (!mask.empty() && mask[v] == 0) {
            continue;
        }
        const std::size_t p = pred.labels[v];
        const std::size_t g = gt.labels[v];
        if (p >= nc || g >= nc) {
            throw Error(ErrorCode::kGridMismatch, "label outside the class range");
        }
        ++counts.evaluated;
        const bool po = p != 0;
        const bool go = g != 0;
        if (po && go) {
            ++counts.occ_tp;
        } else if (po) {
            ++counts.occ_fp;
        } else if (go) {
            ++counts.occ_fn;
        } else {
            ++counts.occ_tn;
        }
        if (p == g) {
            if (p != 0) {
                ++counts.tp[p];
            }
            continue;
        }
        if (p != 0) {
            ++counts.fp[p];
        }
        if (g != 0) {
            ++counts.fn[g];
        }
    }
    return counts;
}

MetricReport iou_miou(const ConfusionCounts &counts) {
    MetricReport report;
    report.per_class.assign(counts.num_classes, std::nullopt);
    double sum = 0.0;
    for (std::size_t c = 1; c < counts.num_classes; ++c) {
        const std::uint64_t denom = counts.tp[c] + counts.fp[c] + counts.fn[c];
        if (denom == 0) {
            continue;
        }
        const double iou = static_cast<double>(counts.tp[c]) / static_cast<double>(denom);
        report.per_class[c] = iou;
        sum += iou;
        ++report.classes_evaluated;
    }
    if (report.classes_evaluated == 0) {
        throw Error(ErrorCode::kUndefinedMetric, "no class is present in either grid");
    }
    report.miou = sum / static_cast<double>(report.classes_evaluated);
    const std::uint64_t occ_denom = counts.occ_tp + counts.occ_fp + counts.occ_fn;
    report.iou = static_cast<double>(counts.occ_tp) / static_cast<double>(occ_denom);
    return report;
}

std::span<const std::string> default_class_names() {
    static const std::array<std::string, 12> names = {
        "empty", "ceiling", "floor", "wall",  "window",    "chair",
        "bed",   "sofa",    "table", "tv",    "furniture", "objects"};
    return names;
}

std::string format_report(const MetricReport &report, std::span<const std::string> class_names) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << "iou = " << report.iou << '\n';
    os << "miou = " << report.miou << '\n';
    for (std::size_t c = 1; c < report.per_class.size(); ++c) {
        const std::string name =
            c < class_names.size() ? class_names[c] : "class_" + std::to_string(c);
        os << name << " = ";
        if (report.per_class[c]) {
            os << *report.per_class[c];
        } else {
            os << "nan";
        }
        os << '\n';
    }
    return os.str();
}

} // namespace gsocc
