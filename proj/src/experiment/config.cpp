#include "speclearn/experiment/config.hpp"

#include <fstream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "speclearn/errors.hpp"

namespace speclearn {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: bad value for '") + key + "'");
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ConfigError("config: not valid JSON");
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");

    static const std::set<std::string> known = {
        "data_seed",        "seeds",          "scenes_train",
        "scenes_test",      "demos_per_scene", "eval_demos_per_scene",
        "test_max_objects", "trajectories_per_scene",
        "ablations",        "eval_irl",       "alpha",
        "beta",             "gamma",          "epochs",
        "eval_epochs",      "batch_size",     "lr",
        "irl_epochs",       "irl_lr",         "refine_max_steps",
        "refine_step_size", "refine_trials_per_scene", "refine_trace_scenes",
        "causal_thetas_per_scene", "bootstrap_samples", "causal_seed",
        "effect_floor",     "latent_grid_n",  "jobs"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ConfigError("config: unknown field '" + key + "'");

    ExperimentConfig c;
    read_field(j, "data_seed", c.data_seed);
    read_field(j, "seeds", c.seeds);
    read_field(j, "scenes_train", c.scenes_train);
    read_field(j, "scenes_test", c.scenes_test);
    read_field(j, "demos_per_scene", c.demos_per_scene);
    read_field(j, "eval_demos_per_scene", c.eval_demos_per_scene);
    read_field(j, "test_max_objects", c.test_max_objects);
    read_field(j, "trajectories_per_scene", c.trajectories_per_scene);
    read_field(j, "ablations", c.ablations);
    read_field(j, "eval_irl", c.eval_irl);
    read_field(j, "alpha", c.alpha);
    read_field(j, "beta", c.beta);
    read_field(j, "gamma", c.gamma);
    read_field(j, "epochs", c.epochs);
    read_field(j, "eval_epochs", c.eval_epochs);
    read_field(j, "batch_size", c.batch_size);
    read_field(j, "lr", c.lr);
    read_field(j, "irl_epochs", c.irl_epochs);
    read_field(j, "irl_lr", c.irl_lr);
    read_field(j, "refine_max_steps", c.refine_max_steps);
    read_field(j, "refine_step_size", c.refine_step_size);
    read_field(j, "refine_trials_per_scene", c.refine_trials_per_scene);
    read_field(j, "refine_trace_scenes", c.refine_trace_scenes);
    read_field(j, "causal_thetas_per_scene", c.causal_thetas_per_scene);
    read_field(j, "bootstrap_samples", c.bootstrap_samples);
    read_field(j, "causal_seed", c.causal_seed);
    read_field(j, "effect_floor", c.effect_floor);
    read_field(j, "latent_grid_n", c.latent_grid_n);
    read_field(j, "jobs", c.jobs);
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    if (scenes_train < 1 || scenes_test < 1)
        throw ConfigError("config: scenes_train and scenes_test must be >= 1");
    if (seeds.empty()) throw ConfigError("config: seeds must not be empty");
    if (demos_per_scene < 1 || eval_demos_per_scene < 1)
        throw ConfigError("config: demo counts must be >= 1");
    if (test_max_objects < kSceneMinObjects || test_max_objects > kSceneMaxObjects)
        throw ConfigError("config: test_max_objects must be in [2,6]");
    if (trajectories_per_scene.empty()) throw ConfigError("config: trajectories_per_scene empty");
    for (int k : trajectories_per_scene)
        if (k < 1 || k > demos_per_scene)
            throw ConfigError("config: trajectories_per_scene entries must be in [1,demos_per_scene]");
    if (ablations.empty()) throw ConfigError("config: ablations must not be empty");
    for (const auto& a : ablations) weights_for(a);  // throws on unknown names
    if (epochs < 1 || eval_epochs < 1 || batch_size < 1 || irl_epochs < 1)
        throw ConfigError("config: epoch/batch settings must be >= 1");
    if (lr <= 0 || irl_lr <= 0) throw ConfigError("config: learning rates must be positive");
    if (refine_max_steps < 1 || refine_trials_per_scene < 1 || refine_step_size <= 0)
        throw ConfigError("config: refine settings invalid");
    if (causal_thetas_per_scene < 1 || bootstrap_samples < 1)
        throw ConfigError("config: causal sampling settings must be >= 1");
    if (effect_floor < 0) throw ConfigError("config: effect_floor must be >= 0");
    if (latent_grid_n < 1) throw ConfigError("config: latent_grid_n must be >= 1");
    if (jobs < 0) throw ConfigError("config: jobs must be >= 0");
}

LossWeights ExperimentConfig::weights_for(const std::string& ablation) const {
    if (ablation == "full") return {alpha, beta, gamma};
    if (ablation == "ae") return {alpha, 0.0, gamma};
    if (ablation == "classifier") return {0.0, 0.0, gamma};
    throw ConfigError("config: unknown ablation '" + ablation + "'");
}

int ExperimentConfig::effective_jobs() const {
    if (jobs > 0) return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace speclearn
