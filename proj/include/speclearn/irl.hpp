#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "speclearn/nn/param_store.hpp"
#include "speclearn/specmodel.hpp"
#include "speclearn/trajectory.hpp"

namespace speclearn {

inline constexpr int kIrlPatchSize = 9;  // pixel window around a trajectory point
inline constexpr int kIrlCurveSamples = 50;
inline constexpr int kIrlFeatureDim = kIrlPatchSize * kIrlPatchSize * 3;

struct IrlConfig {
    int epochs = 300;
    double lr = 0.05;
    int batch_size = 32;
    uint64_t seed = 1;
};

/// The comparison baseline: a logistic per-point reward over a local pixel
/// patch, scored along the sampled trajectory. Because the reward is linear
/// in the patch, a trajectory's score reduces to the reward of its mean
/// patch.
class RewardModel {
public:
    explicit RewardModel(UserType type);

    UserType user_type() const { return user_type_; }
    nn::ParamStore& params() { return params_; }
    const nn::ParamStore& params() const { return params_; }

    /// Mean 9x9 patch (background-padded at borders) over the curve samples;
    /// flattened (dy, dx, channel).
    static std::vector<double> trajectory_feature(const nn::Tensor& image, const Vec2& theta);

    double score(const nn::Tensor& image, const Vec2& theta) const;
    bool classify(const nn::Tensor& image, const Vec2& theta) const;

    void save_checkpoint(const std::filesystem::path& stem) const;
    static RewardModel load_checkpoint(const std::filesystem::path& stem);

private:
    friend TrainLog train_irl(RewardModel&, const std::vector<TrainScene>&, const IrlConfig&);
    UserType user_type_;
    nn::ParamStore params_;  // "w" [243], "b" [1]
};

/// Adam on the BCE between sigmoid(mean reward) and the demonstration label.
TrainLog train_irl(RewardModel& model, const std::vector<TrainScene>& scenes,
                   const IrlConfig& cfg);

}  // namespace speclearn
