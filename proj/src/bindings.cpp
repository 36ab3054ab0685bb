#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "speclearn/causal.hpp"
#include "speclearn/experiment/commands.hpp"
#include "speclearn/experiment/config.hpp"
#include "speclearn/experiment/dataset.hpp"
#include "speclearn/irl.hpp"
#include "speclearn/refine.hpp"
#include "speclearn/specmodel.hpp"

namespace py = pybind11;
using namespace speclearn;

namespace {

py::array_t<double> image_to_numpy(const Image& img) {
    py::array_t<double> out({img.height, img.width, 3});
    std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
    return out;
}

nn::Tensor numpy_to_image_tensor(const py::array_t<double, py::array::c_style>& arr) {
    const auto buf = arr.request();
    if (buf.ndim != 3 || buf.shape[2] != 3)
        throw std::invalid_argument("expected an HxWx3 float64 array");
    const int H = static_cast<int>(buf.shape[0]);
    const int W = static_cast<int>(buf.shape[1]);
    Image img(H, W);
    std::copy(static_cast<const double*>(buf.ptr),
              static_cast<const double*>(buf.ptr) + img.pixels.size(), img.pixels.begin());
    return image_to_tensor(img);
}

std::vector<TrainScene> scenes_from_python(
    const std::vector<std::pair<Scene, std::vector<std::pair<std::pair<double, double>, bool>>>>&
        data,
    UserType type) {
    std::vector<TrainScene> out;
    for (const auto& [scene, demos] : data) {
        TrainScene ts;
        ts.image = image_to_tensor(render_scene(scene));
        ts.user_type = type;
        for (const auto& [theta, valid] : demos)
            ts.demos.push_back({{theta.first, theta.second}, valid});
        out.push_back(std::move(ts));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "speclearn core bindings";

    py::enum_<ObjectKind>(m, "ObjectKind")
        .value("Bowl", ObjectKind::Bowl)
        .value("Plate", ObjectKind::Plate)
        .value("Cutlery", ObjectKind::Cutlery)
        .value("Glass", ObjectKind::Glass);
    py::enum_<Split>(m, "Split").value("Train", Split::Train).value("Test", Split::Test);
    py::enum_<UserType>(m, "UserType")
        .value("Careful", UserType::Careful)
        .value("Normal", UserType::Normal)
        .value("Aggressive", UserType::Aggressive);

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<double, double>())
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("__repr__", [](const Vec2& v) {
            return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
        });

    py::class_<SceneObject>(m, "SceneObject")
        .def_readonly("kind", &SceneObject::kind)
        .def_readonly("center", &SceneObject::center)
        .def_readonly("radius", &SceneObject::radius)
        .def_readonly("angle", &SceneObject::angle)
        .def_readonly("variant", &SceneObject::variant);

    py::class_<Scene>(m, "Scene")
        .def_readonly("objects", &Scene::objects)
        .def_readonly("seed", &Scene::seed)
        .def_readonly("split", &Scene::split);

    m.def("generate_scene", &generate_scene, py::arg("seed"), py::arg("split"),
          py::arg("object_count") = std::nullopt);
    m.def("render_scene", [](const Scene& s) { return image_to_numpy(render_scene(s)); });
    m.def("augment_scene", &augment_scene, py::arg("scene"), py::arg("kind"), py::arg("seed"));
    m.def("scene_to_files", &scene_to_files, py::arg("scene"), py::arg("dir"));
    m.def("scene_from_files", &scene_from_files, py::arg("dir"));

    m.def("bezier_eval", [](std::pair<double, double> theta, double t) {
        const Vec2 p = bezier_eval({theta.first, theta.second}, t);
        return std::make_pair(p.x, p.y);
    });
    m.def("sample_trajectory", [](std::pair<double, double> theta, int T) {
        const Trajectory tr = sample_trajectory({theta.first, theta.second}, T);
        py::array_t<double> out({static_cast<int>(tr.points.size()), 2});
        auto* ptr = out.mutable_data();
        for (size_t i = 0; i < tr.points.size(); ++i) {
            ptr[2 * i] = tr.points[i].x;
            ptr[2 * i + 1] = tr.points[i].y;
        }
        return out;
    });
    m.def("bezier_fit", [](const py::array_t<double, py::array::c_style>& pts) {
        const auto buf = pts.request();
        if (buf.ndim != 2 || buf.shape[1] != 2)
            throw std::invalid_argument("expected an Nx2 array of trajectory points");
        Trajectory tr;
        const double* p = static_cast<const double*>(buf.ptr);
        for (ssize_t i = 0; i < buf.shape[0]; ++i) tr.points.push_back({p[2 * i], p[2 * i + 1]});
        const Vec2 theta = bezier_fit(tr);
        return std::make_pair(theta.x, theta.y);
    });
    m.def("oracle_validity", [](const Scene& scene, std::pair<double, double> theta, UserType t) {
        return oracle_validity(scene, {theta.first, theta.second}, t);
    });
    m.def("synthesize_demonstrations",
          [](const Scene& scene, UserType type, int count, uint64_t seed) {
              std::vector<std::pair<std::pair<double, double>, bool>> out;
              for (const auto& d : synthesize_demonstrations(scene, type, count, seed))
                  out.push_back({{d.theta.x, d.theta.y}, d.valid});
              return out;
          });

    py::class_<LossWeights>(m, "LossWeights")
        .def(py::init([](double a, double b, double g) {
                 return LossWeights{a, b, g};
             }),
             py::arg("alpha") = 1.0, py::arg("beta") = 4.0, py::arg("gamma") = 10.0)
        .def_readwrite("alpha", &LossWeights::alpha)
        .def_readwrite("beta", &LossWeights::beta)
        .def_readwrite("gamma", &LossWeights::gamma);

    py::class_<SpecModel>(m, "SpecModel")
        .def(py::init<UserType, LossWeights, uint64_t, int>(), py::arg("user_type"),
             py::arg("weights") = LossWeights{}, py::arg("seed") = 1,
             py::arg("image_size") = kImageSize)
        .def_property_readonly("user_type", &SpecModel::user_type)
        .def_property_readonly("is_trained", &SpecModel::is_trained)
        .def("encode_mean",
             [](const SpecModel& model, const py::array_t<double, py::array::c_style>& img) {
                 return model.encode_mean(numpy_to_image_tensor(img));
             })
        .def("predict_validity",
             [](const SpecModel& model, const py::array_t<double, py::array::c_style>& img,
                std::pair<double, double> theta) {
                 return model.predict_validity(numpy_to_image_tensor(img),
                                               {theta.first, theta.second});
             })
        .def("latent_grid",
             [](const SpecModel& model, const py::array_t<double, py::array::c_style>& img,
                int grid_n) {
                 const auto grid = model.latent_grid_sample(numpy_to_image_tensor(img), grid_n);
                 py::array_t<double> out({grid_n, grid_n});
                 std::copy(grid.begin(), grid.end(), out.mutable_data());
                 return out;
             })
        .def("train",
             [](SpecModel& model,
                const std::vector<std::pair<
                    Scene, std::vector<std::pair<std::pair<double, double>, bool>>>>& data,
                int epochs, int batch_size, double lr, uint64_t seed) {
                 TrainConfig cfg;
                 cfg.epochs = epochs;
                 cfg.batch_size = batch_size;
                 cfg.lr = lr;
                 cfg.seed = seed;
                 const TrainLog log =
                     model.train(scenes_from_python(data, model.user_type()), cfg);
                 std::vector<std::map<std::string, double>> out;
                 for (const auto& e : log)
                     out.push_back({{"epoch", static_cast<double>(e.epoch)},
                                    {"recon", e.loss.recon},
                                    {"kl", e.loss.kl},
                                    {"cls", e.loss.cls},
                                    {"total", e.loss.total},
                                    {"accuracy", e.accuracy}});
                 return out;
             },
             py::arg("data"), py::arg("epochs") = 50, py::arg("batch_size") = 32,
             py::arg("lr") = 1e-3, py::arg("seed") = 1)
        .def("save_checkpoint", &SpecModel::save_checkpoint, py::arg("stem"), py::arg("epoch"),
             py::arg("seed"))
        .def_static("load_checkpoint", &SpecModel::load_checkpoint, py::arg("stem"));

    py::class_<RefinementTrace>(m, "RefinementTrace")
        .def_property_readonly("thetas",
                               [](const RefinementTrace& t) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& p : t.thetas) out.push_back({p.x, p.y});
                                   return out;
                               })
        .def_readonly("scores", &RefinementTrace::scores)
        .def_readonly("final_valid_oracle", &RefinementTrace::final_valid_oracle)
        .def_readonly("final_valid_model", &RefinementTrace::final_valid_model);

    m.def("refine_trajectory",
          [](const SpecModel& model, const Scene& scene, std::pair<double, double> initial,
             int max_steps, double step_size) {
              return refine_trajectory(model, scene, {initial.first, initial.second}, max_steps,
                                       step_size);
          },
          py::arg("model"), py::arg("scene"), py::arg("initial_theta"), py::arg("max_steps") = 30,
          py::arg("step_size") = 0.05);

    py::class_<EntailedDistribution>(m, "EntailedDistribution")
        .def_readonly("mean", &EntailedDistribution::mean)
        .def_readonly("ci_low", &EntailedDistribution::ci_low)
        .def_readonly("ci_high", &EntailedDistribution::ci_high)
        .def_property_readonly("sample_count", &EntailedDistribution::sample_count);

    m.def("entailed_validity", &entailed_validity, py::arg("model"), py::arg("scenes"),
          py::arg("thetas_per_scene") = 200, py::arg("seed") = 777,
          py::arg("bootstrap_samples") = 1000);
}
