#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "speclearn/scene.hpp"
#include "speclearn/specmodel.hpp"

namespace speclearn {

/// One specification model per user type, indexed by the UserType value.
using ModelSet = std::array<const SpecModel*, 3>;
inline const SpecModel& model_for(const ModelSet& models, UserType type) {
    return *models[static_cast<size_t>(type)];
}

/// A do-intervention on the structural causal model: swap the user type
/// (do S := s) or place an extra symbol into every scene (do Z_I := z_Inew).
struct Intervention {
    enum class Kind { None, SetUserType, AddSymbol };
    Kind kind = Kind::None;
    UserType target_type = UserType::Careful;
    ObjectKind symbol = ObjectKind::Bowl;

    static Intervention none() { return {}; }
    static Intervention set_user_type(UserType t) { return {Kind::SetUserType, t, ObjectKind::Bowl}; }
    static Intervention add_symbol(ObjectKind k) { return {Kind::AddSymbol, UserType::Careful, k}; }

    std::string label() const;
};

/// Binary validity outcomes grouped by scene, with a scene-level bootstrap
/// confidence interval around the pooled mean.
struct EntailedDistribution {
    std::vector<std::vector<uint8_t>> by_scene;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;

    size_t sample_count() const {
        size_t n = 0;
        for (const auto& s : by_scene) n += s.size();
        return n;
    }
};

struct CausalConfig {
    int thetas_per_scene = 200;
    int bootstrap_samples = 1000;
    uint64_t seed = 777;          // control-point draws (shared across branches)
    uint64_t augment_seed = 4242; // symbol placement
    double effect_floor = 0.05;   // minimum effect size for significance
};

/// Samples `thetas_per_scene` uniform control points per scene and records
/// whether the model entails validity for each. Draws are keyed by scene
/// index and `seed` only, so two calls with the same seed see identical
/// (scene, theta) pairs regardless of the model: the common-random-numbers
/// discipline behind every intervention comparison.
EntailedDistribution entailed_validity(const SpecModel& model, const std::vector<Scene>& scenes,
                                       int thetas_per_scene, uint64_t seed,
                                       int bootstrap_samples = 1000);

/// Eq-2-style comparison: the same draws scored by the observed-type model
/// and the `target` model.
std::pair<EntailedDistribution, EntailedDistribution> intervene_user_type(
    const SpecModel& source, const SpecModel& target, const std::vector<Scene>& scenes,
    const CausalConfig& cfg);

/// Eq-3-style comparison: baseline scenes vs the same scenes augmented with
/// one extra object of `kind`, re-rendered and re-encoded.
std::pair<EntailedDistribution, EntailedDistribution> intervene_symbol(
    const SpecModel& model, const std::vector<Scene>& scenes, ObjectKind kind,
    const CausalConfig& cfg);

/// Dispatch over the Intervention variants; None returns two identical
/// distributions.
std::pair<EntailedDistribution, EntailedDistribution> intervene(
    const ModelSet& models, UserType observed_type, const Intervention& intervention,
    const std::vector<Scene>& scenes, const CausalConfig& cfg);

struct CausalCell {
    Intervention intervention;
    EntailedDistribution dist;
    double delta = 0.0;  // intervened mean - baseline mean
    double delta_ci_low = 0.0;
    double delta_ci_high = 0.0;
    bool significant = false;
};

struct CausalRow {
    UserType user_type = UserType::Careful;
    EntailedDistribution baseline;
    std::vector<CausalCell> cells;  // one per ObjectKind
};

struct CausalReport {
    std::vector<CausalRow> rows;  // careful, normal, aggressive
};

/// The full 3 user types x (baseline + 4 symbol interventions) grid.
/// Significance = |delta| > effect_floor and the paired scene-level bootstrap
/// CI of the delta excluding zero.
CausalReport causal_table(const ModelSet& models, const std::vector<Scene>& scenes,
                          const CausalConfig& cfg);

/// The directional pattern the trained models are expected to show:
/// careful reacts (negatively) to every symbol, normal only to glasses,
/// aggressive to nothing.
bool direction_structure_ok(const CausalReport& report);

void write_causal_csv(const CausalReport& report, const std::filesystem::path& path);
std::string render_causal_table(const CausalReport& report);

}  // namespace speclearn
