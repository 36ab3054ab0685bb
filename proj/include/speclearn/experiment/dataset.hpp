#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "speclearn/experiment/config.hpp"
#include "speclearn/scene.hpp"
#include "speclearn/specmodel.hpp"
#include "speclearn/trajectory.hpp"

namespace speclearn {

/// On-disk dataset layout under a root directory:
///   scenes/{train,test}/scene_###/{scene.json,scene.png}
///   demos/<user_type>/train_###.json        (training demonstrations)
///   demos_eval/<user_type>/train_###.json   (held-out demonstrations)
///   manifest.json
namespace dataset_paths {
std::filesystem::path scene_dir(const std::filesystem::path& root, Split split, int index);
std::filesystem::path demo_file(const std::filesystem::path& root, UserType type, int index,
                                bool eval_set);
}  // namespace dataset_paths

struct DemoFile {
    UserType user_type = UserType::Careful;
    std::string scene_path;
    std::vector<Demonstration> demos;
};

void write_demos_json(const std::filesystem::path& path, const DemoFile& demos);
DemoFile read_demos_json(const std::filesystem::path& path);

struct Dataset {
    std::vector<Scene> train_scenes;
    std::vector<Scene> test_scenes;
    // indexed [user_type][train scene index]
    std::array<std::vector<std::vector<Demonstration>>, 3> demos;
    std::array<std::vector<std::vector<Demonstration>>, 3> eval_demos;
};

/// A scene is usable for the experiment only if every label bucket any user
/// type needs is reachable; probed on the coarse control-point grid.
bool scene_supports_all_types(const Scene& scene);

/// Deterministic scene draw for dataset slot `index`, retrying until the
/// scene supports demonstration synthesis for every user type.
Scene generate_dataset_scene(uint64_t data_seed, Split split, int index, int max_objects);

void generate_dataset(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
Dataset load_dataset(const std::filesystem::path& root);

/// Assembles the in-memory training set for one user type; `take_per_scene`
/// < 0 means all demos. `subsample_seed` shuffles per-scene demo order before
/// taking (data randomization for the evaluation sweep).
std::vector<TrainScene> build_train_scenes(const Dataset& data, UserType type, int take_per_scene,
                                           uint64_t subsample_seed);

}  // namespace speclearn
