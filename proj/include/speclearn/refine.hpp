#pragma once

#include <cstdint>
#include <vector>

#include "speclearn/specmodel.hpp"

namespace speclearn {

/// Refinement stops early once the classifier score reaches this value.
inline constexpr double kRefineStopScore = 0.95;
inline constexpr int kDefaultRefineSteps = 30;
inline constexpr double kDefaultRefineStepSize = 0.05;

struct RefinementTrace {
    Vec2 initial_theta;
    std::vector<Vec2> thetas;    // initial control point plus one entry per step
    std::vector<double> scores;  // classifier score at each recorded theta
    bool final_valid_oracle = false;
    bool final_valid_model = false;
};

/// Gradient ascent of the classifier score with respect to the trajectory
/// latent, with the scene latent pinned to the posterior mean. Steps use the
/// unit-normalized gradient scaled by `step_size` and are clamped to
/// [-0.25, 1.25]^2. Refuses untrained models.
RefinementTrace refine_trajectory(const SpecModel& model, const Scene& scene, Vec2 initial_theta,
                                  int max_steps = kDefaultRefineSteps,
                                  double step_size = kDefaultRefineStepSize);

/// Same, with the scene posterior mean supplied by the caller so that many
/// refinements on one scene encode it only once.
RefinementTrace refine_trajectory_mu(const SpecModel& model, const Scene& scene,
                                     const std::vector<double>& mu, Vec2 initial_theta,
                                     int max_steps = kDefaultRefineSteps,
                                     double step_size = kDefaultRefineStepSize);

struct RefineStats {
    UserType user_type = UserType::Careful;
    int trials = 0;
    int successes = 0;
    double success_rate = 0.0;
};

struct RefineTraceRecord {
    int scene_index = 0;
    int trial = 0;
    RefinementTrace trace;
};

/// Samples oracle-invalid initial control points (uniform ones for the
/// aggressive type, where nothing is invalid), refines each, and reports the
/// oracle-checked success rate.
RefineStats evaluate_refinement(const SpecModel& model, const std::vector<Scene>& test_scenes,
                                int trials_per_scene, uint64_t seed,
                                int max_steps = kDefaultRefineSteps,
                                double step_size = kDefaultRefineStepSize,
                                std::vector<RefineTraceRecord>* traces = nullptr);

}  // namespace speclearn
