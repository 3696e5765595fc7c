#include "gsocc/sampling.hpp"

#include <cmath>
#include <limits>

namespace gsocc {

DepthMap::DepthMap(int width, int height, double fill)
    : width(width), height(height),
      values(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)),
             fill) {
    if (width < 0 || height < 0) {
        throw Error(ErrorCode::kInvalidInput, "depth map dimensions must be non-negative");
    }
}

DepthMap::DepthMap(int width, int height, std::vector<double> v)
    : width(width), height(height), values(std::move(v)) {
    if (width < 0 || height < 0 ||
        values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::kInvalidInput, "depth map size does not match its dimensions");
    }
}

void SamplingConfig::validate() const {
    if (num_samples < 1) {
        throw Error(ErrorCode::kInvalidInput, "K must be at least 1");
    }
    if (!(std::isfinite(scale) && scale > 0.0)) {
        throw Error(ErrorCode::kInvalidInput, "sampling scale must be positive");
    }
    if (stride < 1) {
        throw Error(ErrorCode::kInvalidInput, "pixel stride must be at least 1");
    }
}

std::vector<double> sample_offsets(int num_samples, double scale) {
    if (num_samples < 1) {
        throw Error(ErrorCode::kInvalidInput, "num_samples must be at least 1");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw Error(ErrorCode::kInvalidInput, "sampling scale must be positive and finite");
    }
    if (num_samples == 1) {
        return {0.0};
    }
    std::vector<double> offsets(static_cast<std::size_t>(num_samples));
    const double denom = static_cast<double>(num_samples - 1);
    for (int k = 0; k < num_samples; ++k) {
        offsets[k] = scale * (static_cast<double>(k) / denom);
    }
    // linspace endpoint is exact
    offsets.back() = scale;
    return offsets;
}

std::vector<double> sample_offsets(const SamplingConfig &cfg) {
    cfg.validate();
    return sample_offsets(cfg.num_samples, cfg.scale);
}

double sample_spacing(int num_samples, double scale) {
    return num_samples > 1 ? scale / static_cast<double>(num_samples - 1) : scale;
}

std::vector<SamplePoint> volumetric_sample(const DepthMap &depth,
                                           const CameraModel &cam,
                                           const SamplingConfig &cfg,
                                           const DepthMap *scale_map,
                                           SamplingStats *stats) {
    cfg.validate();
    if (depth.values.size() !=
        static_cast<std::size_t>(depth.width) * static_cast<std::size_t>(depth.height)) {
        throw Error(ErrorCode::kInvalidInput, "depth map size does not match its dimensions");
    }
    if (scale_map && (scale_map->width != depth.width || scale_map->height != depth.height)) {
        throw Error(ErrorCode::kInvalidInput, "scale map dimensions differ from depth map");
    }

    const std::vector<double> unit_offsets = sample_offsets(cfg.num_samples, 1.0);
    SamplingStats local;
    std::vector<SamplePoint> samples;

    for (int v = 0; v < depth.height; v += cfg.stride) {
        for (int u = 0; u < depth.width; u += cfg.stride) {
            ++local.visited_pixels;
            const double d = depth.at(u, v);
            if (!DepthMap::is_valid(d)) {
                ++local.invalid_pixels;
                continue;
            }
            double scale = cfg.scale;
            if (scale_map && DepthMap::is_valid(scale_map->at(u, v))) {
                scale = scale_map->at(u, v);
            }
            const Vec3 ray = ray_direction(cam, {u + 0.5, v + 0.5});
            const double spacing = sample_spacing(cfg.num_samples, scale);
            for (int k = 0; k < cfg.num_samples; ++k) {
                const double offset = unit_offsets[k] * scale;
                samples.push_back({u, v, k + 1, (d + offset) * ray, offset, spacing});
            }
        }
    }
    if (stats) {
        *stats = local;
    }
    return samples;
}

} // namespace gsocc
