#include "speclearn/experiment/dataset.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "speclearn/errors.hpp"
#include "speclearn/rng.hpp"

namespace speclearn {

namespace {

using nlohmann::json;

std::string scene_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%03d", index);
    return buf;
}

std::string demo_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "train_%03d.json", index);
    return buf;
}

}  // namespace

namespace dataset_paths {

std::filesystem::path scene_dir(const std::filesystem::path& root, Split split, int index) {
    return root / "scenes" / to_string(split) / scene_name(index);
}

std::filesystem::path demo_file(const std::filesystem::path& root, UserType type, int index,
                                bool eval_set) {
    return root / (eval_set ? "demos_eval" : "demos") / to_string(type) / demo_name(index);
}

}  // namespace dataset_paths

void write_demos_json(const std::filesystem::path& path, const DemoFile& demos) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
    json list = json::array();
    for (const auto& d : demos.demos)
        list.push_back({{"theta", {d.theta.x, d.theta.y}}, {"valid", d.valid}});
    const json j{{"version", 1},
                 {"user_type", to_string(demos.user_type)},
                 {"scene_path", demos.scene_path},
                 {"demos", std::move(list)}};
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << j.dump(1) << '\n';
    if (!os.good()) throw IoError("write failed for " + path.string());
}

DemoFile read_demos_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path.string());
    json j = json::parse(is, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw SchemaError("demos file is not valid JSON: " + path.string());
    try {
        if (j.at("version").get<int>() != 1)
            throw SchemaError("demos file has unsupported version: " + path.string());
        DemoFile out;
        out.user_type = user_type_from_string(j.at("user_type").get<std::string>());
        out.scene_path = j.at("scene_path").get<std::string>();
        for (const auto& jd : j.at("demos")) {
            const auto& t = jd.at("theta");
            out.demos.push_back({{t.at(0).get<double>(), t.at(1).get<double>()},
                                 jd.at("valid").get<bool>()});
        }
        return out;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("demos file: ") + e.what());
    }
}

bool scene_supports_all_types(const Scene& scene) {
    bool has_glass = false;
    for (const auto& o : scene.objects) has_glass |= o.kind == ObjectKind::Glass;
    if (!has_glass) return false;  // normal-invalid demos would be unsynthesizable

    constexpr int kGrid = 21;
    bool careful_valid = false, careful_invalid = false;
    bool normal_valid = false, normal_invalid = false;
    for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j < kGrid; ++j) {
            const Vec2 theta{static_cast<double>(i) / (kGrid - 1),
                             static_cast<double>(j) / (kGrid - 1)};
            const bool cv = min_curve_clearance(scene.objects, theta, kOracleCurveSamples, false) >=
                            kClearanceThreshold;
            const bool nv = min_curve_clearance(scene.objects, theta, kOracleCurveSamples, true) >=
                            kClearanceThreshold;
            careful_valid |= cv;
            careful_invalid |= !cv;
            normal_valid |= nv;
            normal_invalid |= !nv;
            if (careful_valid && careful_invalid && normal_valid && normal_invalid) return true;
        }
    return false;
}

Scene generate_dataset_scene(uint64_t data_seed, Split split, int index, int max_objects) {
    const uint64_t split_tag = split == Split::Test ? 1 : 0;
    for (uint64_t attempt = 0; attempt < 100; ++attempt) {
        const uint64_t seed =
            derive_seed(data_seed, {0x5CE2EULL, split_tag, static_cast<uint64_t>(index), attempt});
        Rng rng(derive_seed(seed, {0xC027ULL}));
        const int count = static_cast<int>(rng.range(kSceneMinObjects, max_objects));
        Scene scene;
        try {
            scene = generate_scene(seed, split, count);
        } catch (const PlacementFailure&) {
            continue;
        }
        if (scene_supports_all_types(scene)) return scene;
    }
    throw PlacementFailure("no dataset-usable scene found for slot " + std::to_string(index));
}

void generate_dataset(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory " + out_dir.string());

    json manifest{{"version", 1},
                  {"data_seed", cfg.data_seed},
                  {"scenes_train", cfg.scenes_train},
                  {"scenes_test", cfg.scenes_test},
                  {"demos_per_scene", cfg.demos_per_scene},
                  {"eval_demos_per_scene", cfg.eval_demos_per_scene}};
    json train_seeds = json::array(), test_seeds = json::array();

    for (int i = 0; i < cfg.scenes_train; ++i) {
        const Scene scene =
            generate_dataset_scene(cfg.data_seed, Split::Train, i, kSceneMaxObjects);
        train_seeds.push_back(scene.seed);
        const auto dir = dataset_paths::scene_dir(out_dir, Split::Train, i);
        scene_to_files(scene, dir);
        const std::string rel = std::filesystem::relative(dir, out_dir).generic_string();
        for (UserType type : kAllUserTypes) {
            DemoFile df;
            df.user_type = type;
            df.scene_path = rel;
            df.demos = synthesize_demonstrations(
                scene, type, cfg.demos_per_scene,
                derive_seed(cfg.data_seed, {1, static_cast<uint64_t>(type), static_cast<uint64_t>(i)}));
            write_demos_json(dataset_paths::demo_file(out_dir, type, i, false), df);

            df.demos = synthesize_demonstrations(
                scene, type, cfg.eval_demos_per_scene,
                derive_seed(cfg.data_seed, {2, static_cast<uint64_t>(type), static_cast<uint64_t>(i)}));
            write_demos_json(dataset_paths::demo_file(out_dir, type, i, true), df);
        }
    }
    for (int i = 0; i < cfg.scenes_test; ++i) {
        const Scene scene =
            generate_dataset_scene(cfg.data_seed, Split::Test, i, cfg.test_max_objects);
        test_seeds.push_back(scene.seed);
        scene_to_files(scene, dataset_paths::scene_dir(out_dir, Split::Test, i));
    }

    manifest["scene_seeds"] = json{{"train", std::move(train_seeds)}, {"test", std::move(test_seeds)}};
    std::ofstream os(out_dir / "manifest.json");
    if (!os) throw IoError("cannot write manifest.json");
    os << manifest.dump(1) << '\n';
    if (!os.good()) throw IoError("write failed for manifest.json");
}

Dataset load_dataset(const std::filesystem::path& root) {
    std::ifstream ms(root / "manifest.json");
    if (!ms) throw IoError("cannot read " + (root / "manifest.json").string());
    json manifest = json::parse(ms, nullptr, /*allow_exceptions=*/false);
    if (manifest.is_discarded() || manifest.value("version", 0) != 1)
        throw SchemaError("bad dataset manifest in " + root.string());

    Dataset data;
    const int n_train = manifest.at("scenes_train").get<int>();
    const int n_test = manifest.at("scenes_test").get<int>();
    for (int i = 0; i < n_train; ++i)
        data.train_scenes.push_back(scene_from_files(dataset_paths::scene_dir(root, Split::Train, i)));
    for (int i = 0; i < n_test; ++i)
        data.test_scenes.push_back(scene_from_files(dataset_paths::scene_dir(root, Split::Test, i)));

    for (UserType type : kAllUserTypes) {
        auto& d = data.demos[static_cast<size_t>(type)];
        auto& e = data.eval_demos[static_cast<size_t>(type)];
        for (int i = 0; i < n_train; ++i) {
            d.push_back(read_demos_json(dataset_paths::demo_file(root, type, i, false)).demos);
            e.push_back(read_demos_json(dataset_paths::demo_file(root, type, i, true)).demos);
        }
    }
    return data;
}

std::vector<TrainScene> build_train_scenes(const Dataset& data, UserType type, int take_per_scene,
                                           uint64_t subsample_seed) {
    const auto& per_scene = data.demos[static_cast<size_t>(type)];
    std::vector<TrainScene> out;
    out.reserve(data.train_scenes.size());
    for (size_t i = 0; i < data.train_scenes.size(); ++i) {
        TrainScene ts;
        ts.image = image_to_tensor(render_scene(data.train_scenes[i]));
        ts.user_type = type;
        const auto& all = per_scene[i];
        if (take_per_scene < 0 || take_per_scene >= static_cast<int>(all.size())) {
            ts.demos = all;
        } else {
            std::vector<int> order(all.size());
            for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
            Rng rng(derive_seed(subsample_seed, {0x5B5ULL, static_cast<uint64_t>(type), i}));
            rng.shuffle(order);
            for (int k = 0; k < take_per_scene; ++k)
                ts.demos.push_back(all[static_cast<size_t>(order[k])]);
        }
        out.push_back(std::move(ts));
    }
    return out;
}

}  // namespace speclearn
