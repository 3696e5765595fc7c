#pragma once

#include "gsocc/camera.hpp"
#include "gsocc/gaussian.hpp"
#include "gsocc/sampling.hpp"
#include "gsocc/scene.hpp"
#include "gsocc/splatting.hpp"

#include <filesystem>
#include <iosfwd>

namespace gsocc::io {

// Binary formats are little-endian.
//   DMAP1  : "DMAP1", u32 width, u32 height, width*height f32 (NaN = invalid)
//   CMAP1  : "CMAP1", u32 width, u32 height, width*height u8
//   GSET1  : "GSET1", u32 count, u32 N_c, per primitive
//            3 f32 mean, 3 f32 scale, 4 f32 quaternion (w x y z), f32 opacity,
//            N_c f32 logits
//   OGRID1 : "OGRID1", u32 X, Y, Z, u32 N_c, f32 voxel_size, 3 f32 origin,
//            X*Y*Z u8 labels, X*Y*Z f32 scores
// Readers throw Error(kFormat) on bad magic or truncation, Error(kIo) when the
// file cannot be opened.

void write_depth(std::ostream &os, const DepthMap &depth);
DepthMap read_depth(std::istream &is);
void save_depth(const std::filesystem::path &path, const DepthMap &depth);
DepthMap load_depth(const std::filesystem::path &path);

void write_class_map(std::ostream &os, const ClassMap &classes);
ClassMap read_class_map(std::istream &is);
void save_class_map(const std::filesystem::path &path, const ClassMap &classes);
ClassMap load_class_map(const std::filesystem::path &path);

/// GSET files carry no frame tag; sets are loaded as world frame.
void write_gaussians(std::ostream &os, const GaussianSet &set);
GaussianSet read_gaussians(std::istream &is);
void save_gaussians(const std::filesystem::path &path, const GaussianSet &set);
GaussianSet load_gaussians(const std::filesystem::path &path);

void write_grid(std::ostream &os, const OccupancyGrid &grid);
OccupancyGrid read_grid(std::istream &is);
void save_grid(const std::filesystem::path &path, const OccupancyGrid &grid);
OccupancyGrid load_grid(const std::filesystem::path &path);

/// Camera as `key = value` text: fx, fy, cx, cy, width, height,
/// rotation (w x y z), translation (x y z).
void save_camera(const std::filesystem::path &path, const CameraModel &cam);
CameraModel load_camera(const std::filesystem::path &path);

/// Scene as JSON.
void save_scene(const std::filesystem::path &path, const SyntheticScene &scene);
SyntheticScene load_scene(const std::filesystem::path &path);

} // namespace gsocc::io
