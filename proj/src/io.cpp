#include "gsocc/io.hpp"
#include "gsocc/pipeline.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gsocc::io {

namespace {

constexpr char kDepthMagic[] = "DMAP1";
constexpr char kClassMagic[] = "CMAP1";
constexpr char kGaussianMagic[] = "GSET1";
constexpr char kGridMagic[] = "OGRID1";

void put_u32(std::ostream &os, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char *>(b), 4);
}

void put_f32(std::ostream &os, double v) { put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

std::uint32_t get_u32(std::istream &is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char *>(b), 4)) {
        throw Error(ErrorCode::kFormat, "unexpected end of file");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f32(std::istream &is) { return std::bit_cast<float>(get_u32(is)); }

template <std::size_t N>
void put_magic(std::ostream &os, const char (&magic)[N]) {
    os.write(magic, N - 1);
}

template <std::size_t N>
void expect_magic(std::istream &is, const char (&magic)[N]) {
    char buf[N - 1];
    if (!is.read(buf, N - 1) || std::memcmp(buf, magic, N - 1) != 0) {
        throw Error(ErrorCode::kFormat, std::string("missing ") + magic + " header");
    }
}

void get_bytes(std::istream &is, std::uint8_t *dst, std::size_t n) {
    if (n && !is.read(reinterpret_cast<char *>(dst), static_cast<std::streamsize>(n))) {
        throw Error(ErrorCode::kFormat, "unexpected end of file");
    }
}

// Guards allocations driven by header fields.
constexpr std::uint64_t kMaxElements = 1ULL << 32;

std::uint64_t checked_product(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > kMaxElements / a) {
        throw Error(ErrorCode::kFormat, "header dimensions are implausibly large");
    }
    return a * b;
}

std::ofstream open_out(const std::filesystem::path &path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
    }
    return os;
}

std::ifstream open_in(const std::filesystem::path &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error(ErrorCode::kIo, "cannot open " + path.string());
    }
    return is;
}

void finish(std::ofstream &os, const std::filesystem::path &path) {
    os.flush();
    if (!os) {
        throw Error(ErrorCode::kIo, "failed writing " + path.string());
    }
}

std::string read_text(const std::filesystem::path &path) {
    std::ifstream is = open_in(path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<double> parse_numbers(const std::string &text, std::size_t expected,
                                  const std::string &key) {
    std::istringstream ss(text);
    std::vector<double> out;
    double v;
    while (ss >> v) {
        out.push_back(v);
    }
    if (out.size() != expected || !ss.eof()) {
        throw Error(ErrorCode::kFormat, "camera key '" + key + "' needs " +
                                            std::to_string(expected) + " numbers");
    }
    return out;
}

nlohmann::json vec_json(const Vec3 &v) { return {v.x(), v.y(), v.z()}; }

Vec3 json_vec(const nlohmann::json &j) {
    if (!j.is_array() || j.size() != 3) {
        throw Error(ErrorCode::kFormat, "expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

} // namespace

void write_depth(std::ostream &os, const DepthMap &depth) {
    put_magic(os, kDepthMagic);
    put_u32(os, static_cast<std::uint32_t>(depth.width));
    put_u32(os, static_cast<std::uint32_t>(depth.height));
    for (double d : depth.values) {
        put_f32(os, DepthMap::is_valid(d) ? d : std::nan(""));
    }
}

DepthMap read_depth(std::istream &is) {
    expect_magic(is, kDepthMagic);
    const std::uint32_t w = get_u32(is);
    const std::uint32_t h = get_u32(is);
    std::vector<double> values(checked_product(w, h));
    for (auto &v : values) {
        v = get_f32(is);
    }
    return DepthMap(static_cast<int>(w), static_cast<int>(h), std::move(values));
}

void save_depth(const std::filesystem::path &path, const DepthMap &depth) {
    auto os = open_out(path);
    write_depth(os, depth);
    finish(os, path);
}

DepthMap load_depth(const std::filesystem::path &path) {
    auto is = open_in(path);
    return read_depth(is);
}

void write_class_map(std::ostream &os, const ClassMap &classes) {
    put_magic(os, kClassMagic);
    put_u32(os, static_cast<std::uint32_t>(classes.width));
    put_u32(os, static_cast<std::uint32_t>(classes.height));
    os.write(reinterpret_cast<const char *>(classes.ids.data()),
             static_cast<std::streamsize>(classes.ids.size()));
}

ClassMap read_class_map(std::istream &is) {
    expect_magic(is, kClassMagic);
    const std::uint32_t w = get_u32(is);
    const std::uint32_t h = get_u32(is);
    checked_product(w, h);
    ClassMap classes(static_cast<int>(w), static_cast<int>(h));
    get_bytes(is, classes.ids.data(), classes.ids.size());
    return classes;
}

void save_class_map(const std::filesystem::path &path, const ClassMap &classes) {
    auto os = open_out(path);
    write_class_map(os, classes);
    finish(os, path);
}

ClassMap load_class_map(const std::filesystem::path &path) {
    auto is = open_in(path);
    return read_class_map(is);
}

void write_gaussians(std::ostream &os, const GaussianSet &set) {
    put_magic(os, kGaussianMagic);
    put_u32(os, static_cast<std::uint32_t>(set.size()));
    put_u32(os, static_cast<std::uint32_t>(set.num_classes()));
    for (const auto &g : set) {
        for (int i = 0; i < 3; ++i) put_f32(os, g.mean[i]);
        for (int i = 0; i < 3; ++i) put_f32(os, g.scale[i]);
        put_f32(os, g.rotation.w());
        put_f32(os, g.rotation.x());
        put_f32(os, g.rotation.y());
        put_f32(os, g.rotation.z());
        put_f32(os, g.opacity);
        for (double c : g.logits) put_f32(os, c);
    }
}

GaussianSet read_gaussians(std::istream &is) {
    expect_magic(is, kGaussianMagic);
    const std::uint32_t count = get_u32(is);
    const std::uint32_t nc = get_u32(is);
    checked_product(count, nc + 11ULL);
    if (nc == 0) {
        throw Error(ErrorCode::kFormat, "GSET1 class count must be positive");
    }
    std::vector<GaussianPrimitive> gaussians;
    gaussians.reserve(count);
    for (std::uint32_t n = 0; n < count; ++n) {
        GaussianPrimitive g;
        for (int i = 0; i < 3; ++i) g.mean[i] = get_f32(is);
        for (int i = 0; i < 3; ++i) g.scale[i] = get_f32(is);
        const double w = get_f32(is);
        const double x = get_f32(is);
        const double y = get_f32(is);
        const double z = get_f32(is);
        g.rotation = Quat(w, x, y, z);
        g.opacity = get_f32(is);
        g.logits.resize(nc);
        for (auto &c : g.logits) c = get_f32(is);
        // Stored values are kept verbatim (no renormalization) so that
        // load/save is bit-exact; only the invariants are checked.
        try {
            GaussianPrimitive::create(g.mean, g.scale, g.rotation, g.opacity, g.logits);
        } catch (const Error &e) {
            throw Error(ErrorCode::kFormat, "GSET1 primitive " + std::to_string(n) + ": " + e.what());
        }
        gaussians.push_back(std::move(g));
    }
    return GaussianSet(nc, Frame::kWorld, std::move(gaussians));
}

void save_gaussians(const std::filesystem::path &path, const GaussianSet &set) {
    auto os = open_out(path);
    write_gaussians(os, set);
    finish(os, path);
}

GaussianSet load_gaussians(const std::filesystem::path &path) {
    auto is = open_in(path);
    return read_gaussians(is);
}

void write_grid(std::ostream &os, const OccupancyGrid &grid) {
    const GridSpec &s = grid.spec;
    put_magic(os, kGridMagic);
    for (int a = 0; a < 3; ++a) put_u32(os, static_cast<std::uint32_t>(s.dims[a]));
    put_u32(os, static_cast<std::uint32_t>(s.num_classes));
    put_f32(os, s.voxel_size);
    for (int a = 0; a < 3; ++a) put_f32(os, s.origin[a]);
    os.write(reinterpret_cast<const char *>(grid.labels.data()),
             static_cast<std::streamsize>(grid.labels.size()));
    for (double v : grid.scores) put_f32(os, v);
}

OccupancyGrid read_grid(std::istream &is) {
    expect_magic(is, kGridMagic);
    GridSpec spec;
    std::uint64_t total = 1;
    for (int a = 0; a < 3; ++a) {
        const std::uint32_t d = get_u32(is);
        total = checked_product(total, d);
        spec.dims[a] = static_cast<int>(d);
    }
    spec.num_classes = get_u32(is);
    spec.voxel_size = get_f32(is);
    for (int a = 0; a < 3; ++a) spec.origin[a] = get_f32(is);
    try {
        spec.validate();
    } catch (const Error &e) {
        throw Error(ErrorCode::kFormat, std::string("OGRID1 header: ") + e.what());
    }
    OccupancyGrid grid(spec);
    get_bytes(is, grid.labels.data(), grid.labels.size());
    for (auto &v : grid.scores) v = get_f32(is);
    for (auto l : grid.labels) {
        if (l >= spec.num_classes) {
            throw Error(ErrorCode::kFormat, "OGRID1 label outside the class range");
        }
    }
    return grid;
}

void save_grid(const std::filesystem::path &path, const OccupancyGrid &grid) {
    auto os = open_out(path);
    write_grid(os, grid);
    finish(os, path);
}

OccupancyGrid load_grid(const std::filesystem::path &path) {
    auto is = open_in(path);
    return read_grid(is);
}

void save_camera(const std::filesystem::path &path, const CameraModel &cam) {
    auto os = open_out(path);
    os.precision(17);
    const Quat q(cam.pose().rotation);
    const Vec3 &t = cam.pose().translation;
    os << "fx = " << cam.fx() << "\nfy = " << cam.fy() << "\ncx = " << cam.cx()
       << "\ncy = " << cam.cy() << "\nwidth = " << cam.width() << "\nheight = " << cam.height()
       << "\nrotation = " << q.w() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z()
       << "\ntranslation = " << t.x() << ' ' << t.y() << ' ' << t.z() << '\n';
    finish(os, path);
}

CameraModel load_camera(const std::filesystem::path &path) {
    const auto kv = parse_key_values(read_text(path));
    auto get = [&](const std::string &key, std::size_t n) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw Error(ErrorCode::kFormat, "camera file lacks '" + key + "'");
        }
        return parse_numbers(it->second, n, key);
    };
    const double fx = get("fx", 1)[0];
    const double fy = get("fy", 1)[0];
    const double cx = get("cx", 1)[0];
    const double cy = get("cy", 1)[0];
    const int width = static_cast<int>(get("width", 1)[0]);
    const int height = static_cast<int>(get("height", 1)[0]);
    RigidTransform pose;
    if (kv.contains("rotation")) {
        const auto q = get("rotation", 4);
        pose = RigidTransform::from_quaternion(Quat(q[0], q[1], q[2], q[3]), Vec3::Zero());
    }
    if (kv.contains("translation")) {
        const auto t = get("translation", 3);
        pose.translation = Vec3(t[0], t[1], t[2]);
    }
    return CameraModel(fx, fy, cx, cy, width, height, pose);
}

void save_scene(const std::filesystem::path &path, const SyntheticScene &scene) {
    nlohmann::json j;
    j["interior_min"] = vec_json(scene.interior_min);
    j["interior_max"] = vec_json(scene.interior_max);
    j["shell_thickness"] = scene.shell_thickness;
    j["boxes"] = nlohmann::json::array();
    for (const auto &b : scene.boxes) {
        j["boxes"].push_back({{"min", vec_json(b.min)}, {"max", vec_json(b.max)}, {"label", b.label}});
    }
    auto os = open_out(path);
    os << j.dump(2) << '\n';
    finish(os, path);
}

SyntheticScene load_scene(const std::filesystem::path &path) {
    try {
        const auto j = nlohmann::json::parse(read_text(path));
        SyntheticScene scene;
        scene.interior_min = json_vec(j.at("interior_min"));
        scene.interior_max = json_vec(j.at("interior_max"));
        scene.shell_thickness = j.at("shell_thickness").get<double>();
        for (const auto &b : j.at("boxes")) {
            scene.boxes.push_back({json_vec(b.at("min")), json_vec(b.at("max")), b.at("label").get<int>()});
        }
        return scene;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::kFormat, "scene file " + path.string() + ": " + e.what());
    }
}

} // namespace gsocc::io
