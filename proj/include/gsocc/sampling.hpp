#pragma once

#include "gsocc/camera.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gsocc {

/// Row-major per-pixel ray distances (meters).  Non-finite or non-positive
/// entries mark invalid pixels.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    DepthMap() = default;
    DepthMap(int width, int height, double fill = 0.0);
    DepthMap(int width, int height, std::vector<double> values);

    double at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
    double &at(int u, int v) { return values[static_cast<std::size_t>(v) * width + u]; }
    static bool is_valid(double d) { return std::isfinite(d) && d > 0.0; }
};

/// Row-major per-pixel class ids; 0 where no surface was hit.
struct ClassMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> ids;

    ClassMap() = default;
    ClassMap(int width, int height, std::uint8_t fill = 0)
        : width(width), height(height),
          ids(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

    std::uint8_t at(int u, int v) const { return ids[static_cast<std::size_t>(v) * width + u]; }
    std::uint8_t &at(int u, int v) { return ids[static_cast<std::size_t>(v) * width + u]; }
};

struct SamplingConfig {
    int num_samples = 16;  ///< K, samples per ray
    double scale = 0.48;   ///< inward extent covered by the K offsets (meters)
    int stride = 4;        ///< pixel step

    void validate() const;
};

struct SamplePoint {
    int u = 0;            ///< source pixel column
    int v = 0;            ///< source pixel row
    int k = 1;            ///< 1-based sample index along the ray
    Vec3 position;        ///< camera frame
    double offset = 0.0;  ///< delta_k, distance past the surface
    double spacing = 0.0; ///< distance between consecutive samples on this ray
};

struct SamplingStats {
    std::size_t visited_pixels = 0;
    std::size_t invalid_pixels = 0;
};

/// linspace(0, 1, K) * scale.  K == 1 yields {0}.
std::vector<double> sample_offsets(const SamplingConfig &cfg);
std::vector<double> sample_offsets(int num_samples, double scale);

/// Distance between consecutive offsets.  For K == 1 there is only one
/// sample, which covers the whole extent, so the spacing is `scale`.
double sample_spacing(int num_samples, double scale);

/// Emits (d + delta_k) * r for every valid strided pixel and k = 1..K, in
/// pixel-major then k order.  `scale_map`, when given, overrides cfg.scale
/// per pixel (invalid entries fall back to cfg.scale).
std::vector<SamplePoint> volumetric_sample(const DepthMap &depth,
                                           const CameraModel &cam,
                                           const SamplingConfig &cfg,
                                           const DepthMap *scale_map = nullptr,
                                           SamplingStats *stats = nullptr);

} // namespace gsocc
