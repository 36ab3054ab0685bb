#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "speclearn/specmodel.hpp"

namespace speclearn {

/// Everything the CLI commands need; every field has a default and maps
/// one-to-one onto a JSON key of the same name.
struct ExperimentConfig {
    uint64_t data_seed = 90210;
    std::vector<uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    int scenes_train = 20;
    int scenes_test = 20;
    int demos_per_scene = 10;
    int eval_demos_per_scene = 10;
    int test_max_objects = 5;  // leaves room for the symbol interventions

    std::vector<int> trajectories_per_scene = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<std::string> ablations = {"full", "ae", "classifier"};
    bool eval_irl = true;

    double alpha = 1.0;
    double beta = 4.0;
    double gamma = 10.0;

    int epochs = 150;
    int eval_epochs = 80;
    int batch_size = 32;
    double lr = 1e-3;

    int irl_epochs = 300;
    double irl_lr = 0.05;

    int refine_max_steps = 30;
    double refine_step_size = 0.05;
    int refine_trials_per_scene = 5;
    int refine_trace_scenes = 3;  // traces emitted per user type

    int causal_thetas_per_scene = 200;
    int bootstrap_samples = 1000;
    uint64_t causal_seed = 777;
    double effect_floor = 0.05;
    int latent_grid_n = 41;

    int jobs = 0;  // 0 = hardware concurrency

    static ExperimentConfig from_file(const std::filesystem::path& path);
    static ExperimentConfig from_json_text(const std::string& text);
    void validate() const;  // throws ConfigError

    /// Maps an ablation name onto loss coefficients: "full" keeps all three,
    /// "ae" zeroes beta, "classifier" zeroes alpha and beta.
    LossWeights weights_for(const std::string& ablation) const;

    int effective_jobs() const;
};

}  // namespace speclearn
