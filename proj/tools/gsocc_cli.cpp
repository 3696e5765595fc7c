// gsocc command-line driver: synthetic scenes, per-frame sampling and
// splatting, streaming fusion, evaluation and index benchmarking.

#include "gsocc/io.hpp"
#include "gsocc/pipeline.hpp"
#include "gsocc/scene.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using namespace gsocc;

namespace {

struct CommonOptions {
    std::string config;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    int threads = 0;
};

void add_common(CLI::App *cmd, CommonOptions &opts) {
    cmd->add_option("--config", opts.config, "key = value configuration file");
    cmd->add_option("--set", opts.overrides, "override a config key (key=value), repeatable");
    cmd->add_option("--seed", opts.seed, "seed for scene generation and benchmarks");
    cmd->add_option("--threads", opts.threads, "worker threads (overrides config)");
}

PipelineConfig resolve_config(const CommonOptions &opts) {
    PipelineConfig cfg = opts.config.empty() ? PipelineConfig{} : load_config(opts.config);
    for (const auto &kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::kInvalidInput, "--set expects key=value, got '" + kv + "'");
        }
        const auto parsed = parse_key_values(kv);
        for (const auto &[key, value] : parsed) {
            cfg.set(key, value);
        }
    }
    if (opts.threads > 0) {
        cfg.threads = opts.threads;
    }
    cfg.validate();
    return cfg;
}

StreamFrame load_frame(const std::string &prefix) {
    return {io::load_depth(prefix + ".dmap"), io::load_class_map(prefix + ".cmap"),
            io::load_camera(prefix + ".cam")};
}

void print_kv(const std::string &key, double value) {
    std::cout << key << " = " << value << '\n';
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Sparse Gaussian occupancy: sampling, splatting, fusion and evaluation"};
    app.require_subcommand(1);

    // gen-scene
    CommonOptions gen_opts;
    std::string gen_out = ".";
    std::string gen_views = "mono";
    int gen_width = 800;
    int gen_height = 600;
    auto *gen = app.add_subcommand("gen-scene", "generate a seeded synthetic room with cameras and oracle grid");
    add_common(gen, gen_opts);
    gen->add_option("--out-dir", gen_out, "output directory");
    gen->add_option("--views", gen_views, "camera layout: mono or halves")
        ->check(CLI::IsMember({"mono", "halves"}));
    gen->add_option("--width", gen_width, "image width");
    gen->add_option("--height", gen_height, "image height");

    // render
    CommonOptions render_opts;
    std::string render_scene, render_camera, render_out;
    auto *render = app.add_subcommand("render", "render ray-distance depth and class maps");
    add_common(render, render_opts);
    render->add_option("--scene", render_scene, "scene JSON")->required();
    render->add_option("--camera", render_camera, "camera file")->required();
    render->add_option("--out", render_out, "output prefix (.dmap/.cmap/.cam)")->required();

    // sample
    CommonOptions sample_opts;
    std::string sample_frame, sample_out;
    auto *sample = app.add_subcommand("sample", "volumetric sampling to world-frame Gaussians (GSET1)");
    add_common(sample, sample_opts);
    sample->add_option("--frame", sample_frame, "frame prefix (.dmap/.cmap/.cam)")->required();
    sample->add_option("--out", sample_out, "output GSET1 file")->required();

    // splat
    CommonOptions splat_opts;
    std::string splat_in, splat_out;
    auto *splat_cmd = app.add_subcommand("splat", "splat a GSET1 file into an OGRID1 grid");
    add_common(splat_cmd, splat_opts);
    splat_cmd->add_option("--gaussians", splat_in, "input GSET1")->required();
    splat_cmd->add_option("--out", splat_out, "output OGRID1")->required();

    // stream
    CommonOptions stream_opts;
    std::vector<std::string> stream_frames;
    std::string stream_scene, stream_grid_out, stream_bank_out;
    auto *stream = app.add_subcommand("stream", "fuse frames into a memory bank and splat the scene");
    add_common(stream, stream_opts);
    stream->add_option("--frame", stream_frames, "frame prefixes in temporal order")->required();
    stream->add_option("--scene", stream_scene, "scene JSON; sizes the scene-level grid");
    stream->add_option("--out-grid", stream_grid_out, "output OGRID1")->required();
    stream->add_option("--out-bank", stream_bank_out, "output GSET1 checkpoint of the bank");

    // eval
    CommonOptions eval_opts;
    std::string eval_pred, eval_gt, eval_camera;
    auto *eval = app.add_subcommand("eval", "IoU / mIoU of a predicted grid against ground truth");
    add_common(eval, eval_opts);
    eval->add_option("--pred", eval_pred, "predicted OGRID1")->required();
    eval->add_option("--gt", eval_gt, "ground-truth OGRID1")->required();
    eval->add_option("--camera", eval_camera, "restrict to this camera's frustum");

    // prune
    CommonOptions prune_opts;
    std::string prune_in, prune_out;
    auto *prune_cmd = app.add_subcommand("prune", "drop Gaussians with opacity below prune.tau");
    add_common(prune_cmd, prune_opts);
    prune_cmd->add_option("--gaussians", prune_in, "input GSET1")->required();
    prune_cmd->add_option("--out", prune_out, "output GSET1")->required();

    // bench-index
    CommonOptions bench_opts;
    std::size_t bench_bank = 50000;
    std::size_t bench_queries = 5000;
    auto *bench = app.add_subcommand("bench-index", "spatial hash vs linear scan radius search");
    add_common(bench, bench_opts);
    bench->add_option("--bank-size", bench_bank, "number of stored means");
    bench->add_option("--queries", bench_queries, "number of radius queries");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const PipelineConfig cfg = resolve_config(gen_opts);
            fs::create_directories(gen_out);
            const SyntheticScene scene = generate_room_scene(gen_opts.seed, cfg.grid);
            io::save_scene(fs::path(gen_out) / "scene.json", scene);
            io::save_grid(fs::path(gen_out) / "gt.ogrid", oracle_occupancy(scene, cfg.grid));
            if (gen_views == "mono") {
                io::save_camera(fs::path(gen_out) / "cam0.cam",
                                default_room_camera(cfg.grid, gen_width, gen_height));
            } else {
                const auto cams = half_view_cameras(cfg.grid, gen_width, gen_height);
                for (std::size_t i = 0; i < cams.size(); ++i) {
                    io::save_camera(fs::path(gen_out) / ("cam" + std::to_string(i) + ".cam"), cams[i]);
                }
            }
            std::cout << "boxes = " << scene.boxes.size() << '\n';
        } else if (*render) {
            resolve_config(render_opts);
            const SyntheticScene scene = io::load_scene(render_scene);
            const CameraModel cam = io::load_camera(render_camera);
            const RenderedFrame frame = render_depth(scene, cam);
            io::save_depth(render_out + ".dmap", frame.depth);
            io::save_class_map(render_out + ".cmap", frame.classes);
            io::save_camera(render_out + ".cam", cam);
            std::size_t valid = 0;
            for (double d : frame.depth.values) valid += DepthMap::is_valid(d) ? 1 : 0;
            std::cout << "valid_pixels = " << valid << '\n';
        } else if (*sample) {
            PipelineConfig cfg = resolve_config(sample_opts);
            cfg.prune_tau = 0.0; // pruning is its own command
            const StreamFrame frame = load_frame(sample_frame);
            SamplingStats stats;
            const GaussianSet set =
                monocular_gaussians(frame.depth, frame.classes, frame.camera, cfg, &stats);
            io::save_gaussians(sample_out, set);
            std::cout << "gaussians = " << set.size() << '\n'
                      << "visited_pixels = " << stats.visited_pixels << '\n'
                      << "invalid_pixels = " << stats.invalid_pixels << '\n';
        } else if (*splat_cmd) {
            const PipelineConfig cfg = resolve_config(splat_opts);
            const GaussianSet set = io::load_gaussians(splat_in);
            const OccupancyGrid grid = splat(set, cfg.grid, {cfg.theta_occ, cfg.threads, false});
            io::save_grid(splat_out, grid);
            std::cout << "occupied = " << grid.occupied_count() << '\n';
        } else if (*stream) {
            const PipelineConfig cfg = resolve_config(stream_opts);
            std::vector<StreamFrame> frames;
            for (const auto &prefix : stream_frames) {
                frames.push_back(load_frame(prefix));
            }
            GridSpec scene_spec = cfg.grid;
            if (!stream_scene.empty()) {
                const SyntheticScene scene = io::load_scene(stream_scene);
                scene_spec = scene_grid_spec(scene.outer_min(), scene.outer_max(),
                                             cfg.grid.voxel_size, cfg.grid.num_classes);
            }
            const StreamingResult result = run_streaming(frames, cfg, scene_spec);
            io::save_grid(stream_grid_out, result.grid);
            if (!stream_bank_out.empty()) {
                io::save_gaussians(stream_bank_out, result.bank.to_set());
            }
            for (std::size_t i = 0; i < result.per_frame.size(); ++i) {
                std::cout << "frame" << i << ".matched = " << result.per_frame[i].matched << '\n'
                          << "frame" << i << ".inserted = " << result.per_frame[i].inserted << '\n';
            }
            std::cout << "bank_size = " << result.bank.size() << '\n'
                      << "occupied = " << result.grid.occupied_count() << '\n';
        } else if (*eval) {
            const PipelineConfig cfg = resolve_config(eval_opts);
            const OccupancyGrid pred = io::load_grid(eval_pred);
            const OccupancyGrid gt = io::load_grid(eval_gt);
            std::vector<std::uint8_t> mask;
            if (!eval_camera.empty()) {
                mask = frustum_mask(gt.spec, io::load_camera(eval_camera), cfg.near, cfg.far);
            }
            const MetricReport report = iou_miou(confusion(pred, gt, mask));
            std::cout << format_report(report, default_class_names());
        } else if (*prune_cmd) {
            const PipelineConfig cfg = resolve_config(prune_opts);
            const GaussianSet in = io::load_gaussians(prune_in);
            const GaussianSet out = prune(in, cfg.prune_tau);
            io::save_gaussians(prune_out, out);
            std::cout << "kept = " << out.size() << '\n' << "pruned = " << in.size() - out.size() << '\n';
        } else if (*bench) {
            const PipelineConfig cfg = resolve_config(bench_opts);
            std::mt19937_64 rng(bench_opts.seed);
            std::uniform_real_distribution<double> coord(0.0, 4.8);
            GaussianMemoryBank bank(cfg.grid.num_classes, cfg.fusion.epsilon);
            std::vector<double> logits(cfg.grid.num_classes, 0.0);
            for (std::size_t i = 0; i < bench_bank; ++i) {
                bank.insert(GaussianPrimitive::create(Vec3(coord(rng), coord(rng), coord(rng)),
                                                      Vec3::Constant(0.02), Quat::Identity(), 0.5,
                                                      logits));
            }
            std::vector<Vec3> queries(bench_queries);
            for (auto &q : queries) q = Vec3(coord(rng), coord(rng), coord(rng));

            using Clock = std::chrono::steady_clock;
            std::size_t hash_hits = 0;
            const auto t0 = Clock::now();
            for (const auto &q : queries) hash_hits += bank.radius_neighbors(q, cfg.fusion.epsilon).size();
            const auto t1 = Clock::now();
            std::size_t scan_hits = 0;
            const double r2 = cfg.fusion.epsilon * cfg.fusion.epsilon;
            for (const auto &q : queries) {
                for (const auto &m : bank.means()) scan_hits += (m - q).squaredNorm() <= r2 ? 1 : 0;
            }
            const auto t2 = Clock::now();
            const double hash_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            const double scan_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
            print_kv("hash_ms", hash_ms);
            print_kv("scan_ms", scan_ms);
            print_kv("speedup", scan_ms / std::max(hash_ms, 1e-9));
            print_kv("hash_hits", static_cast<double>(hash_hits));
            print_kv("scan_hits", static_cast<double>(scan_hits));
        }
    } catch (const Error &e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
