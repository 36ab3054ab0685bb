#include "speclearn/refine.hpp"

#include <cmath>
#include <stdexcept>

namespace speclearn {

namespace {

Vec2 clamp_control(const Vec2& theta) {
    return {std::clamp(theta.x, kControlClampLo, kControlClampHi),
            std::clamp(theta.y, kControlClampLo, kControlClampHi)};
}

}  // namespace

RefinementTrace refine_trajectory_mu(const SpecModel& model, const Scene& scene,
                                     const std::vector<double>& mu, Vec2 initial_theta,
                                     int max_steps, double step_size) {
    if (max_steps < 1) throw std::invalid_argument("refine: max_steps must be >= 1");
    if (!model.is_trained())
        throw std::logic_error("refine: model parameters are still at initialization");

    RefinementTrace trace;
    trace.initial_theta = initial_theta;

    std::vector<double> z(mu);
    z.resize(kFullLatentDim);
    Vec2 theta = clamp_control(initial_theta);
    for (int step = 0;; ++step) {
        z[kSceneLatentDim] = theta.x;
        z[kSceneLatentDim + 1] = theta.y;
        Vec2 grad;
        const double score = model.classify_with_theta_grad(z, &grad);
        trace.thetas.push_back(theta);
        trace.scores.push_back(score);
        if (score >= kRefineStopScore || step >= max_steps) break;
        const double norm = grad.norm();
        // a vanished gradient leaves theta in place; the loop still runs to
        // max_steps so that early termination always implies a high score
        if (norm >= 1e-12) theta = clamp_control(theta + (step_size / norm) * grad);
    }

    trace.final_valid_model = trace.scores.back() >= 0.5;
    trace.final_valid_oracle = oracle_validity(scene, trace.thetas.back(), model.user_type());
    return trace;
}

RefinementTrace refine_trajectory(const SpecModel& model, const Scene& scene, Vec2 initial_theta,
                                  int max_steps, double step_size) {
    const nn::Tensor image = image_to_tensor(render_scene(scene));
    return refine_trajectory_mu(model, scene, model.encode_mean(image), initial_theta, max_steps,
                                step_size);
}

RefineStats evaluate_refinement(const SpecModel& model, const std::vector<Scene>& test_scenes,
                                int trials_per_scene, uint64_t seed, int max_steps,
                                double step_size, std::vector<RefineTraceRecord>* traces) {
    if (trials_per_scene < 1) throw std::invalid_argument("evaluate_refinement: trials must be >= 1");
    RefineStats stats;
    stats.user_type = model.user_type();

    for (size_t i = 0; i < test_scenes.size(); ++i) {
        const Scene& scene = test_scenes[i];
        const std::vector<double> mu = model.encode_mean(image_to_tensor(render_scene(scene)));
        for (int t = 0; t < trials_per_scene; ++t) {
            Rng rng(derive_seed(seed, {static_cast<uint64_t>(model.user_type()), i,
                                       static_cast<uint64_t>(t)}));
            Vec2 initial{rng.uniform(), rng.uniform()};
            if (model.user_type() != UserType::Aggressive) {
                // start from a trajectory that actually breaks the specification
                int attempts = 0;
                while (oracle_validity(scene, initial, model.user_type()) && attempts++ < 10000)
                    initial = {rng.uniform(), rng.uniform()};
            }
            RefinementTrace trace =
                refine_trajectory_mu(model, scene, mu, initial, max_steps, step_size);
            ++stats.trials;
            if (trace.final_valid_oracle) ++stats.successes;
            if (traces) traces->push_back({static_cast<int>(i), t, std::move(trace)});
        }
    }
    stats.success_rate = stats.trials ? static_cast<double>(stats.successes) / stats.trials : 0.0;
    return stats;
}

}  // namespace speclearn
