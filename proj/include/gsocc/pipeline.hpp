#pragma once

#include "gsocc/attributes.hpp"
#include "gsocc/fusion.hpp"
#include "gsocc/metrics.hpp"
#include "gsocc/sampling.hpp"
#include "gsocc/splatting.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gsocc {

struct PipelineConfig {
    SamplingConfig sampling;
    AttributeConfig attributes;
    GridSpec grid;
    FusionConfig fusion;
    double prune_tau = kDefaultPruneTau;
    double theta_occ = kDefaultThetaOcc;
    double near = kDefaultNear;
    double far = kDefaultFar;
    int threads = 1;

    void validate() const;

    /// Applies one `key = value` setting.  Throws Error(kInvalidInput) for an
    /// unknown key or an unparsable value.
    void set(const std::string &key, const std::string &value);

    /// Every field as `key = value` lines, in a form `set` accepts.
    std::string to_text() const;
};

/// Parses flat `key = value` text; `#` starts a comment.
std::map<std::string, std::string> parse_key_values(const std::string &text);

PipelineConfig load_config(const std::filesystem::path &path);
PipelineConfig config_from_text(const std::string &text);

/// Per-frame Gaussians in the world frame: sample, attribute, transform and
/// prune.  Pixels with class 0 are skipped along with invalid depth.
GaussianSet monocular_gaussians(const DepthMap &depth, const ClassMap &classes,
                                const CameraModel &cam, const PipelineConfig &cfg,
                                SamplingStats *stats = nullptr);

/// monocular_gaussians followed by splat into cfg.grid.
OccupancyGrid run_monocular(const DepthMap &depth, const ClassMap &classes,
                            const CameraModel &cam, const PipelineConfig &cfg);

struct StreamFrame {
    DepthMap depth;
    ClassMap classes;
    CameraModel camera;
};

struct StreamingResult {
    GaussianMemoryBank bank;
    OccupancyGrid grid;
    std::vector<FusionStats> per_frame;
};

/// Fuses frames in order into a memory bank and splats the bank into
/// `scene_spec`.
StreamingResult run_streaming(std::span<const StreamFrame> frames, const PipelineConfig &cfg,
                              const GridSpec &scene_spec);

} // namespace gsocc
