#include "gsocc/pipeline.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace gsocc {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string &key, const std::string &value, std::size_t n) {
    std::istringstream ss(value);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            throw Error(ErrorCode::kInvalidInput, "config key '" + key + "': bad number '" + tok + "'");
        }
        out.push_back(v);
    }
    if (out.size() != n) {
        throw Error(ErrorCode::kInvalidInput,
                    "config key '" + key + "' expects " + std::to_string(n) + " value(s)");
    }
    return out;
}

double number(const std::string &key, const std::string &value) { return numbers(key, value, 1)[0]; }

int integer(const std::string &key, const std::string &value) {
    const double v = number(key, value);
    if (v != static_cast<double>(static_cast<long long>(v))) {
        throw Error(ErrorCode::kInvalidInput, "config key '" + key + "' expects an integer");
    }
    return static_cast<int>(v);
}

} // namespace

std::map<std::string, std::string> parse_key_values(const std::string &text) {
    std::map<std::string, std::string> out;
    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::kInvalidInput,
                        "line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw Error(ErrorCode::kInvalidInput, "line " + std::to_string(lineno) + ": empty key");
        }
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

void PipelineConfig::validate() const {
    sampling.validate();
    attributes.validate();
    grid.validate();
    fusion.validate();
    if (attributes.num_classes != grid.num_classes) {
        throw Error(ErrorCode::kClassCountMismatch, "attribute and grid class counts differ");
    }
    if (!(prune_tau >= 0.0 && prune_tau <= 1.0)) {
        throw Error(ErrorCode::kInvalidInput, "prune.tau must lie in [0, 1]");
    }
    if (!(theta_occ >= 0.0 && theta_occ <= 1.0)) {
        throw Error(ErrorCode::kInvalidInput, "splat.theta_occ must lie in [0, 1]");
    }
    if (!(near > 0.0 && far > near)) {
        throw Error(ErrorCode::kInvalidInput, "eval needs 0 < near < far");
    }
    if (threads < 1) {
        throw Error(ErrorCode::kInvalidInput, "threads must be at least 1");
    }
}

void PipelineConfig::set(const std::string &key, const std::string &value) {
    if (key == "sampling.K") {
        sampling.num_samples = integer(key, value);
    } else if (key == "sampling.scale") {
        sampling.scale = number(key, value);
    } else if (key == "sampling.stride") {
        sampling.stride = integer(key, value);
    } else if (key == "attributes.sigma_factor") {
        attributes.sigma_factor = number(key, value);
    } else if (key == "attributes.a0") {
        attributes.a0 = number(key, value);
    } else if (key == "attributes.decay") {
        attributes.decay = number(key, value);
    } else if (key == "attributes.logit_gain") {
        attributes.logit_gain = number(key, value);
    } else if (key == "attributes.reference_spacing") {
        attributes.reference_spacing = number(key, value);
    } else if (key == "grid.dims") {
        const auto d = numbers(key, value, 3);
        for (int a = 0; a < 3; ++a) {
            grid.dims[a] = static_cast<int>(d[a]);
        }
    } else if (key == "grid.voxel_size") {
        grid.voxel_size = number(key, value);
    } else if (key == "grid.origin") {
        const auto o = numbers(key, value, 3);
        grid.origin = Vec3(o[0], o[1], o[2]);
    } else if (key == "grid.num_classes" || key == "num_classes") {
        const int n = integer(key, value);
        if (n < 2) {
            throw Error(ErrorCode::kInvalidInput, "num_classes must be at least 2");
        }
        grid.num_classes = static_cast<std::size_t>(n);
        attributes.num_classes = static_cast<std::size_t>(n);
    } else if (key == "fusion.epsilon") {
        fusion.epsilon = number(key, value);
    } else if (key == "fusion.gamma") {
        fusion.gamma = number(key, value);
    } else if (key == "prune.tau") {
        prune_tau = number(key, value);
    } else if (key == "splat.theta_occ") {
        theta_occ = number(key, value);
    } else if (key == "eval.near") {
        near = number(key, value);
    } else if (key == "eval.far") {
        far = number(key, value);
    } else if (key == "threads") {
        threads = integer(key, value);
    } else {
        throw Error(ErrorCode::kInvalidInput, "unknown config key '" + key + "'");
    }
}

std::string PipelineConfig::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "sampling.K = " << sampling.num_samples << '\n'
       << "sampling.scale = " << sampling.scale << '\n'
       << "sampling.stride = " << sampling.stride << '\n'
       << "attributes.sigma_factor = " << attributes.sigma_factor << '\n'
       << "attributes.a0 = " << attributes.a0 << '\n'
       << "attributes.decay = " << attributes.decay << '\n'
       << "attributes.logit_gain = " << attributes.logit_gain << '\n'
       << "attributes.reference_spacing = " << attributes.reference_spacing << '\n'
       << "grid.dims = " << grid.dims[0] << ' ' << grid.dims[1] << ' ' << grid.dims[2] << '\n'
       << "grid.voxel_size = " << grid.voxel_size << '\n'
       << "grid.origin = " << grid.origin.x() << ' ' << grid.origin.y() << ' ' << grid.origin.z()
       << '\n'
       << "grid.num_classes = " << grid.num_classes << '\n'
       << "fusion.epsilon = " << fusion.epsilon << '\n'
       << "fusion.gamma = " << fusion.gamma << '\n'
       << "prune.tau = " << prune_tau << '\n'
       << "splat.theta_occ = " << theta_occ << '\n'
       << "eval.near = " << near << '\n'
       << "eval.far = " << far << '\n'
       << "threads = " << threads << '\n';
    return os.str();
}

PipelineConfig config_from_text(const std::string &text) {
    PipelineConfig cfg;
    for (const auto &[key, value] : parse_key_values(text)) {
        cfg.set(key, value);
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path &path) {
    std::ifstream is(path);
    if (!is) {
        throw Error(ErrorCode::kIo, "cannot open config " + path.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return config_from_text(ss.str());
}

GaussianSet monocular_gaussians(const DepthMap &depth, const ClassMap &classes,
                                const CameraModel &cam, const PipelineConfig &cfg,
                                SamplingStats *stats) {
    cfg.validate();
    if (classes.width != depth.width || classes.height != depth.height) {
        throw Error(ErrorCode::kInvalidInput, "class map dimensions differ from depth map");
    }
    const auto samples = volumetric_sample(depth, cam, cfg.sampling, nullptr, stats);
    GaussianSet world(cfg.attributes.num_classes, Frame::kWorld);
    for (const auto &s : samples) {
        const int label = classes.at(s.u, s.v);
        if (label == 0) {
            continue;
        }
        world.push_back(to_world(cam, heuristic_attributes(s, label, cfg.attributes)));
    }
    return prune(world, cfg.prune_tau);
}

OccupancyGrid run_monocular(const DepthMap &depth, const ClassMap &classes,
                            const CameraModel &cam, const PipelineConfig &cfg) {
    const GaussianSet set = monocular_gaussians(depth, classes, cam, cfg);
    return splat(set, cfg.grid, {cfg.theta_occ, cfg.threads, false});
}

StreamingResult run_streaming(std::span<const StreamFrame> frames, const PipelineConfig &cfg,
                              const GridSpec &scene_spec) {
    cfg.validate();
    StreamingResult result{GaussianMemoryBank(cfg.grid.num_classes, cfg.fusion.epsilon), {}, {}};
    for (const auto &frame : frames) {
        const GaussianSet set = monocular_gaussians(frame.depth, frame.classes, frame.camera, cfg);
        result.per_frame.push_back(fuse_frame(result.bank, set, cfg.fusion));
    }
    result.grid = splat(result.bank.to_set(), scene_spec, {cfg.theta_occ, cfg.threads, false});
    return result;
}

} // namespace gsocc
