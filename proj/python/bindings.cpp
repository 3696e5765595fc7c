#include "gsocc/io.hpp"
#include "gsocc/losses.hpp"
#include "gsocc/pipeline.hpp"
#include "gsocc/scene.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace gsocc;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

DepthMap depth_from_array(const DoubleArray &a) {
    if (a.ndim() != 2) {
        throw Error(ErrorCode::kInvalidInput, "depth must be a 2-D array (height, width)");
    }
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    return DepthMap(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

ClassMap classes_from_array(const ByteArray &a) {
    if (a.ndim() != 2) {
        throw Error(ErrorCode::kInvalidInput, "class map must be a 2-D array (height, width)");
    }
    ClassMap m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), 0);
    std::copy(a.data(), a.data() + a.size(), m.ids.begin());
    return m;
}

DoubleArray depth_to_array(const DepthMap &d) {
    DoubleArray out({d.height, d.width});
    std::copy(d.values.begin(), d.values.end(), out.mutable_data());
    return out;
}

ByteArray classes_to_array(const ClassMap &c) {
    ByteArray out({c.height, c.width});
    std::copy(c.ids.begin(), c.ids.end(), out.mutable_data());
    return out;
}

// Grids are exposed as (X, Y, Z) arrays; storage is x-fastest, so this is the
// Fortran-order view of the flat buffer.
template <typename T, typename Src>
py::array_t<T> grid_array(const GridSpec &spec, const std::vector<Src> &flat) {
    py::array_t<T, py::array::f_style> out({spec.dims[0], spec.dims[1], spec.dims[2]});
    std::copy(flat.begin(), flat.end(), out.mutable_data());
    return out;
}

template <typename T>
std::vector<T> grid_flat(const GridSpec &spec, const py::array &a) {
    auto arr = py::array_t<T, py::array::f_style | py::array::forcecast>::ensure(a);
    if (!arr || arr.ndim() != 3 || arr.shape(0) != spec.dims[0] || arr.shape(1) != spec.dims[1] ||
        arr.shape(2) != spec.dims[2]) {
        throw Error(ErrorCode::kGridMismatch, "array shape does not match the grid dims");
    }
    return std::vector<T>(arr.data(), arr.data() + arr.size());
}

py::dict set_to_arrays(const GaussianSet &set) {
    const auto n = static_cast<py::ssize_t>(set.size());
    const auto nc = static_cast<py::ssize_t>(set.num_classes());
    DoubleArray means({n, py::ssize_t{3}}), scales({n, py::ssize_t{3}}),
        rotations({n, py::ssize_t{4}}), opacities(n), logits({n, nc});
    auto m = means.mutable_unchecked<2>();
    auto s = scales.mutable_unchecked<2>();
    auto r = rotations.mutable_unchecked<2>();
    auto a = opacities.mutable_unchecked<1>();
    auto c = logits.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i) {
        const auto &g = set[static_cast<std::size_t>(i)];
        for (int d = 0; d < 3; ++d) {
            m(i, d) = g.mean[d];
            s(i, d) = g.scale[d];
        }
        r(i, 0) = g.rotation.w();
        r(i, 1) = g.rotation.x();
        r(i, 2) = g.rotation.y();
        r(i, 3) = g.rotation.z();
        a(i) = g.opacity;
        for (py::ssize_t k = 0; k < nc; ++k) c(i, k) = g.logits[static_cast<std::size_t>(k)];
    }
    py::dict out;
    out["means"] = means;
    out["scales"] = scales;
    out["rotations"] = rotations;
    out["opacities"] = opacities;
    out["logits"] = logits;
    return out;
}

GaussianSet set_from_arrays(const DoubleArray &means, const DoubleArray &scales,
                            const DoubleArray &rotations, const DoubleArray &opacities,
                            const DoubleArray &logits, Frame frame) {
    if (means.ndim() != 2 || means.shape(1) != 3 || logits.ndim() != 2) {
        throw Error(ErrorCode::kInvalidInput, "means must be (N, 3) and logits (N, C)");
    }
    const auto n = means.shape(0);
    if (scales.ndim() != 2 || scales.shape(0) != n || scales.shape(1) != 3 || rotations.ndim() != 2 ||
        rotations.shape(0) != n || rotations.shape(1) != 4 || opacities.ndim() != 1 ||
        opacities.shape(0) != n || logits.shape(0) != n) {
        throw Error(ErrorCode::kInvalidInput, "gaussian arrays disagree on count or width");
    }
    const auto nc = logits.shape(1);
    auto m = means.unchecked<2>();
    auto s = scales.unchecked<2>();
    auto r = rotations.unchecked<2>();
    auto a = opacities.unchecked<1>();
    auto c = logits.unchecked<2>();
    GaussianSet set(static_cast<std::size_t>(nc), frame);
    for (py::ssize_t i = 0; i < n; ++i) {
        std::vector<double> row(static_cast<std::size_t>(nc));
        for (py::ssize_t k = 0; k < nc; ++k) row[static_cast<std::size_t>(k)] = c(i, k);
        set.push_back(GaussianPrimitive::create(Vec3(m(i, 0), m(i, 1), m(i, 2)),
                                                Vec3(s(i, 0), s(i, 1), s(i, 2)),
                                                Quat(r(i, 0), r(i, 1), r(i, 2), r(i, 3)), a(i),
                                                std::move(row)));
    }
    return set;
}

py::dict report_to_dict(const MetricReport &r) {
    py::dict out;
    out["iou"] = r.iou;
    out["miou"] = r.miou;
    out["per_class"] = r.per_class;
    out["classes_evaluated"] = r.classes_evaluated;
    return out;
}

LossInput loss_input(const Eigen::MatrixXd &logits, const IntArray &targets, int ignore_label,
                     double gamma) {
    LossInput in;
    in.logits = logits;
    in.targets.assign(targets.data(), targets.data() + targets.size());
    in.ignore_label = ignore_label;
    in.focal_gamma = gamma;
    return in;
}

} // namespace

PYBIND11_MODULE(_gsocc, m) {
    m.doc() = "Sparse Gaussian occupancy: sampling, splatting, fusion, metrics and losses";

    static py::exception<Error> error_type(m, "GsoccError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error &e) {
            py::set_error(error_type, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
        }
    });

    py::enum_<Frame>(m, "Frame").value("CAMERA", Frame::kCamera).value("WORLD", Frame::kWorld);

    py::class_<CameraModel>(m, "Camera")
        .def(py::init([](double fx, double fy, double cx, double cy, int w, int h,
                         const Mat3 &rotation, const Vec3 &translation) {
                 RigidTransform pose;
                 pose.rotation = rotation;
                 pose.translation = translation;
                 return CameraModel(fx, fy, cx, cy, w, h, pose);
             }),
             py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"), py::arg("width"),
             py::arg("height"), py::arg("rotation") = Mat3::Identity(),
             py::arg("translation") = Vec3::Zero())
        .def_property_readonly("fx", &CameraModel::fx)
        .def_property_readonly("fy", &CameraModel::fy)
        .def_property_readonly("cx", &CameraModel::cx)
        .def_property_readonly("cy", &CameraModel::cy)
        .def_property_readonly("width", &CameraModel::width)
        .def_property_readonly("height", &CameraModel::height)
        .def_property_readonly("rotation", [](const CameraModel &c) { return c.pose().rotation; })
        .def_property_readonly("translation", [](const CameraModel &c) { return c.pose().translation; })
        .def("ray_direction",
             [](const CameraModel &c, double u, double v) { return ray_direction(c, {u, v}); })
        .def("backproject", [](const CameraModel &c, double u, double v,
                               double d) { return backproject(c, {u, v}, d); })
        .def("project", [](const CameraModel &c, const Vec3 &p) {
            const Projection pr = project(c, p);
            return py::make_tuple(pr.pixel.u, pr.pixel.v, pr.distance);
        });

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](std::array<int, 3> dims, double voxel_size, const Vec3 &origin,
                         std::size_t num_classes) {
                 GridSpec s;
                 s.dims = dims;
                 s.voxel_size = voxel_size;
                 s.origin = origin;
                 s.num_classes = num_classes;
                 s.validate();
                 return s;
             }),
             py::arg("dims") = std::array<int, 3>{60, 60, 36}, py::arg("voxel_size") = 0.08,
             py::arg("origin") = Vec3::Zero(), py::arg("num_classes") = 12)
        .def_readonly("dims", &GridSpec::dims)
        .def_readonly("voxel_size", &GridSpec::voxel_size)
        .def_readonly("origin", &GridSpec::origin)
        .def_readonly("num_classes", &GridSpec::num_classes)
        .def("voxel_center", &GridSpec::voxel_center)
        .def("__eq__", &GridSpec::operator==);

    py::class_<OccupancyGrid>(m, "OccupancyGrid")
        .def(py::init([](const GridSpec &spec, const py::array &labels, const py::array &scores) {
                 OccupancyGrid g(spec);
                 g.labels = grid_flat<std::uint8_t>(spec, labels);
                 g.scores = grid_flat<double>(spec, scores);
                 return g;
             }),
             py::arg("spec"), py::arg("labels"), py::arg("scores"))
        .def_readonly("spec", &OccupancyGrid::spec)
        .def_property_readonly("labels", [](const OccupancyGrid &g) {
            return grid_array<std::uint8_t>(g.spec, g.labels);
        })
        .def_property_readonly("scores", [](const OccupancyGrid &g) {
            return grid_array<double>(g.spec, g.scores);
        })
        .def("occupied_count", &OccupancyGrid::occupied_count);

    py::class_<GaussianSet>(m, "GaussianSet")
        .def(py::init(&set_from_arrays), py::arg("means"), py::arg("scales"), py::arg("rotations"),
             py::arg("opacities"), py::arg("logits"), py::arg("frame") = Frame::kWorld)
        .def("__len__", &GaussianSet::size)
        .def_property_readonly("num_classes", &GaussianSet::num_classes)
        .def_property_readonly("frame", &GaussianSet::frame)
        .def("to_arrays", &set_to_arrays);

    py::class_<PipelineConfig>(m, "Config")
        .def(py::init<>())
        .def_static("from_text", &config_from_text)
        .def_static("load", &load_config)
        .def("set", &PipelineConfig::set)
        .def("validate", &PipelineConfig::validate)
        .def("to_text", &PipelineConfig::to_text)
        .def_readwrite("grid", &PipelineConfig::grid);

    py::class_<SyntheticScene>(m, "Scene")
        .def_readonly("interior_min", &SyntheticScene::interior_min)
        .def_readonly("interior_max", &SyntheticScene::interior_max)
        .def_readonly("shell_thickness", &SyntheticScene::shell_thickness)
        .def_property_readonly("num_boxes", [](const SyntheticScene &s) { return s.boxes.size(); })
        .def("outer_min", &SyntheticScene::outer_min)
        .def("outer_max", &SyntheticScene::outer_max);

    py::class_<GaussianMemoryBank>(m, "MemoryBank")
        .def(py::init<std::size_t, double>(), py::arg("num_classes"), py::arg("cell_size") = 0.08)
        .def("__len__", &GaussianMemoryBank::size)
        .def("to_set", &GaussianMemoryBank::to_set)
        .def("radius_neighbors", &GaussianMemoryBank::radius_neighbors, py::arg("query"),
             py::arg("eps"))
        .def("fuse_frame",
             [](GaussianMemoryBank &bank, const GaussianSet &incoming, double epsilon, double gamma) {
                 FusionConfig cfg;
                 cfg.epsilon = epsilon;
                 cfg.gamma = gamma;
                 const FusionStats st = fuse_frame(bank, incoming, cfg);
                 return py::make_tuple(st.matched, st.inserted);
             },
             py::arg("incoming"), py::arg("epsilon") = 0.08, py::arg("gamma") = 0.4);

    m.def("volumetric_sample",
          [](const DoubleArray &depth, const CameraModel &cam, int num_samples, double scale,
             int stride) {
              SamplingConfig cfg;
              cfg.num_samples = num_samples;
              cfg.scale = scale;
              cfg.stride = stride;
              const auto samples = volumetric_sample(depth_from_array(depth), cam, cfg);
              DoubleArray out({static_cast<py::ssize_t>(samples.size()), py::ssize_t{3}});
              auto o = out.mutable_unchecked<2>();
              for (std::size_t i = 0; i < samples.size(); ++i) {
                  for (int d = 0; d < 3; ++d) o(static_cast<py::ssize_t>(i), d) = samples[i].position[d];
              }
              return out;
          },
          py::arg("depth"), py::arg("camera"), py::arg("num_samples") = 16, py::arg("scale") = 0.48,
          py::arg("stride") = 4, "Camera-frame sample positions, pixel-major then k.");

    m.def("monocular_gaussians",
          [](const DoubleArray &depth, const ByteArray &classes, const CameraModel &cam,
             const PipelineConfig &cfg) {
              return monocular_gaussians(depth_from_array(depth), classes_from_array(classes), cam, cfg);
          },
          py::arg("depth"), py::arg("classes"), py::arg("camera"), py::arg("config") = PipelineConfig{});

    m.def("splat",
          [](const GaussianSet &set, const GridSpec &spec, double theta_occ, int threads) {
              py::gil_scoped_release release;
              return splat(set, spec, {theta_occ, threads, false});
          },
          py::arg("gaussians"), py::arg("spec"), py::arg("theta_occ") = kDefaultThetaOcc,
          py::arg("threads") = 1);

    m.def("prune", &prune, py::arg("gaussians"), py::arg("tau") = kDefaultPruneTau);

    m.def("run_monocular",
          [](const DoubleArray &depth, const ByteArray &classes, const CameraModel &cam,
             const PipelineConfig &cfg) {
              return run_monocular(depth_from_array(depth), classes_from_array(classes), cam, cfg);
          },
          py::arg("depth"), py::arg("classes"), py::arg("camera"), py::arg("config") = PipelineConfig{});

    m.def("frustum_mask",
          [](const GridSpec &spec, const CameraModel &cam, double near, double far) {
              return grid_array<bool>(spec, frustum_mask(spec, cam, near, far));
          },
          py::arg("spec"), py::arg("camera"), py::arg("near") = kDefaultNear,
          py::arg("far") = kDefaultFar);

    m.def("evaluate",
          [](const OccupancyGrid &pred, const OccupancyGrid &gt, const CameraModel *cam, double near,
             double far) {
              std::vector<std::uint8_t> mask;
              if (cam) mask = frustum_mask(gt.spec, *cam, near, far);
              return report_to_dict(iou_miou(confusion(pred, gt, mask)));
          },
          py::arg("pred"), py::arg("gt"), py::arg("camera") = nullptr,
          py::arg("near") = kDefaultNear, py::arg("far") = kDefaultFar,
          "IoU / mIoU, restricted to the camera frustum when a camera is given.");

    m.def("focal_loss",
          [](const Eigen::MatrixXd &logits, const IntArray &targets, double gamma, int ignore) {
              const LossResult r = focal_loss(loss_input(logits, targets, ignore, gamma));
              return py::make_tuple(r.value, r.gradient);
          },
          py::arg("logits"), py::arg("targets"), py::arg("gamma") = 2.0,
          py::arg("ignore_label") = kIgnoreLabel);
    m.def("cross_entropy",
          [](const Eigen::MatrixXd &logits, const IntArray &targets, int ignore) {
              return cross_entropy(loss_input(logits, targets, ignore, 0.0));
          },
          py::arg("logits"), py::arg("targets"), py::arg("ignore_label") = kIgnoreLabel);
    m.def("lovasz_softmax",
          [](const Eigen::MatrixXd &logits, const IntArray &targets, int ignore) {
              return lovasz_softmax(loss_input(logits, targets, ignore, 0.0));
          },
          py::arg("logits"), py::arg("targets"), py::arg("ignore_label") = kIgnoreLabel);
    m.def("huber_depth",
          [](const std::vector<double> &pred, const std::vector<double> &gt, double delta) {
              const DepthLossResult r = huber_depth(pred, gt, delta);
              return py::make_tuple(r.value, r.gradient);
          },
          py::arg("pred"), py::arg("gt"), py::arg("delta") = 1.0);

    m.def("generate_room_scene",
          [](std::uint64_t seed, const GridSpec &spec) { return generate_room_scene(seed, spec); },
          py::arg("seed"), py::arg("spec") = GridSpec{});
    m.def("render_depth",
          [](const SyntheticScene &scene, const CameraModel &cam) {
              const RenderedFrame f = render_depth(scene, cam);
              return py::make_tuple(depth_to_array(f.depth), classes_to_array(f.classes));
          },
          py::arg("scene"), py::arg("camera"), "Returns (depth, classes) arrays of shape (H, W).");
    m.def("oracle_occupancy", &oracle_occupancy, py::arg("scene"), py::arg("spec") = GridSpec{});
    m.def("default_room_camera", &default_room_camera, py::arg("spec") = GridSpec{},
          py::arg("width") = 800, py::arg("height") = 600, py::arg("hfov") = 1.2217304763960306);
    m.def("half_view_cameras", &half_view_cameras, py::arg("spec") = GridSpec{},
          py::arg("width") = 800, py::arg("height") = 600, py::arg("hfov") = 1.2217304763960306);

    m.def("save_gaussians", &io::save_gaussians);
    m.def("load_gaussians", &io::load_gaussians);
    m.def("save_grid", &io::save_grid);
    m.def("load_grid", &io::load_grid);
    m.def("save_camera", &io::save_camera);
    m.def("load_camera", &io::load_camera);
}
