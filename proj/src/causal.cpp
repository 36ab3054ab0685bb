#include "speclearn/causal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "speclearn/errors.hpp"
#include "speclearn/rng.hpp"

namespace speclearn {

namespace {

struct SceneCounts {
    std::vector<double> sums;    // valid outcomes per scene
    std::vector<double> counts;  // samples per scene
};

SceneCounts per_scene_counts(const EntailedDistribution& d) {
    SceneCounts sc;
    for (const auto& outcomes : d.by_scene) {
        double s = 0.0;
        for (uint8_t v : outcomes) s += v;
        sc.sums.push_back(s);
        sc.counts.push_back(static_cast<double>(outcomes.size()));
    }
    return sc;
}

void percentile_bounds(std::vector<double>& sorted_values, double& lo, double& hi) {
    std::sort(sorted_values.begin(), sorted_values.end());
    const size_t n = sorted_values.size();
    const size_t ilo = std::min(n - 1, static_cast<size_t>(0.025 * n));
    const size_t ihi = std::min(n - 1, static_cast<size_t>(std::max(0.0, 0.975 * n - 1.0)));
    lo = sorted_values[ilo];
    hi = sorted_values[ihi];
}

void finalize_distribution(EntailedDistribution& d, uint64_t seed, int bootstrap_samples) {
    double total = 0.0, count = 0.0;
    const SceneCounts sc = per_scene_counts(d);
    for (size_t i = 0; i < sc.sums.size(); ++i) {
        total += sc.sums[i];
        count += sc.counts[i];
    }
    d.mean = count > 0 ? total / count : 0.0;

    const size_t S = d.by_scene.size();
    Rng rng(derive_seed(seed, {0xB007ULL, S}));
    std::vector<double> means;
    means.reserve(static_cast<size_t>(bootstrap_samples));
    for (int b = 0; b < bootstrap_samples; ++b) {
        double s = 0.0, c = 0.0;
        for (size_t i = 0; i < S; ++i) {
            const size_t idx = rng.index(S);
            s += sc.sums[idx];
            c += sc.counts[idx];
        }
        means.push_back(c > 0 ? s / c : 0.0);
    }
    percentile_bounds(means, d.ci_low, d.ci_high);
    // the percentile interval must bracket the point estimate
    d.ci_low = std::min(d.ci_low, d.mean);
    d.ci_high = std::max(d.ci_high, d.mean);
}

std::vector<Vec2> scene_thetas(uint64_t seed, size_t scene_index, int n) {
    Rng rng(derive_seed(seed, {0x7E7AULL, scene_index}));
    std::vector<Vec2> thetas(static_cast<size_t>(n));
    for (auto& t : thetas) t = {rng.uniform(), rng.uniform()};
    return thetas;
}

std::vector<uint8_t> scene_outcomes(const SpecModel& model, const Scene& scene,
                                    const std::vector<Vec2>& thetas) {
    const nn::Tensor image = image_to_tensor(render_scene(scene));
    const std::vector<double> mu = model.encode_mean(image);
    const std::vector<double> preds = model.classify_batch(mu, thetas);
    std::vector<uint8_t> out(preds.size());
    for (size_t i = 0; i < preds.size(); ++i) out[i] = preds[i] >= 0.5 ? 1 : 0;
    return out;
}

Scene augment_with_retry(const Scene& scene, ObjectKind kind, uint64_t seed) {
    for (uint64_t attempt = 0;; ++attempt) {
        try {
            return augment_scene(scene, kind, derive_seed(seed, {attempt}));
        } catch (const PlacementFailure&) {
            if (attempt >= 19) throw;
        }
    }
}

void fill_delta(CausalCell& cell, const EntailedDistribution& base, const CausalConfig& cfg) {
    cell.delta = cell.dist.mean - base.mean;
    const SceneCounts base_sc = per_scene_counts(base);
    const SceneCounts int_sc = per_scene_counts(cell.dist);
    const size_t S = base.by_scene.size();

    // paired bootstrap: both branches are resampled with the same scene draws
    Rng rng(derive_seed(cfg.seed, {0xDE17AULL, static_cast<uint64_t>(cell.intervention.symbol), S}));
    std::vector<double> deltas;
    deltas.reserve(static_cast<size_t>(cfg.bootstrap_samples));
    for (int b = 0; b < cfg.bootstrap_samples; ++b) {
        double bs = 0.0, bc = 0.0, is = 0.0, ic = 0.0;
        for (size_t i = 0; i < S; ++i) {
            const size_t idx = rng.index(S);
            bs += base_sc.sums[idx];
            bc += base_sc.counts[idx];
            is += int_sc.sums[idx];
            ic += int_sc.counts[idx];
        }
        deltas.push_back((ic > 0 ? is / ic : 0.0) - (bc > 0 ? bs / bc : 0.0));
    }
    percentile_bounds(deltas, cell.delta_ci_low, cell.delta_ci_high);
    cell.delta_ci_low = std::min(cell.delta_ci_low, cell.delta);
    cell.delta_ci_high = std::max(cell.delta_ci_high, cell.delta);
    cell.significant = std::abs(cell.delta) > cfg.effect_floor &&
                       (cell.delta_ci_low > 0.0 || cell.delta_ci_high < 0.0);
}

}  // namespace

std::string Intervention::label() const {
    switch (kind) {
        case Kind::None: return "none";
        case Kind::SetUserType: return std::string("set_user_type:") + to_string(target_type);
        case Kind::AddSymbol: return std::string("add_") + to_string(symbol);
    }
    return "?";
}

EntailedDistribution entailed_validity(const SpecModel& model, const std::vector<Scene>& scenes,
                                       int thetas_per_scene, uint64_t seed,
                                       int bootstrap_samples) {
    if (scenes.empty()) throw std::invalid_argument("entailed_validity: empty scene list");
    if (thetas_per_scene < 1)
        throw std::invalid_argument("entailed_validity: thetas_per_scene must be >= 1");
    EntailedDistribution d;
    d.by_scene.reserve(scenes.size());
    for (size_t i = 0; i < scenes.size(); ++i)
        d.by_scene.push_back(
            scene_outcomes(model, scenes[i], scene_thetas(seed, i, thetas_per_scene)));
    finalize_distribution(d, seed, bootstrap_samples);
    return d;
}

std::pair<EntailedDistribution, EntailedDistribution> intervene_user_type(
    const SpecModel& source, const SpecModel& target, const std::vector<Scene>& scenes,
    const CausalConfig& cfg) {
    return {entailed_validity(source, scenes, cfg.thetas_per_scene, cfg.seed, cfg.bootstrap_samples),
            entailed_validity(target, scenes, cfg.thetas_per_scene, cfg.seed, cfg.bootstrap_samples)};
}

std::pair<EntailedDistribution, EntailedDistribution> intervene_symbol(
    const SpecModel& model, const std::vector<Scene>& scenes, ObjectKind kind,
    const CausalConfig& cfg) {
    std::vector<Scene> augmented;
    augmented.reserve(scenes.size());
    for (size_t i = 0; i < scenes.size(); ++i)
        augmented.push_back(augment_with_retry(
            scenes[i], kind, derive_seed(cfg.augment_seed, {static_cast<uint64_t>(kind), i})));
    return {entailed_validity(model, scenes, cfg.thetas_per_scene, cfg.seed, cfg.bootstrap_samples),
            entailed_validity(model, augmented, cfg.thetas_per_scene, cfg.seed,
                              cfg.bootstrap_samples)};
}

std::pair<EntailedDistribution, EntailedDistribution> intervene(
    const ModelSet& models, UserType observed_type, const Intervention& intervention,
    const std::vector<Scene>& scenes, const CausalConfig& cfg) {
    const SpecModel& observed = model_for(models, observed_type);
    switch (intervention.kind) {
        case Intervention::Kind::None: {
            auto base = entailed_validity(observed, scenes, cfg.thetas_per_scene, cfg.seed,
                                          cfg.bootstrap_samples);
            return {base, base};
        }
        case Intervention::Kind::SetUserType:
            return intervene_user_type(observed, model_for(models, intervention.target_type),
                                       scenes, cfg);
        case Intervention::Kind::AddSymbol:
            return intervene_symbol(observed, scenes, intervention.symbol, cfg);
    }
    throw std::logic_error("intervene: unknown intervention kind");
}

CausalReport causal_table(const ModelSet& models, const std::vector<Scene>& scenes,
                          const CausalConfig& cfg) {
    CausalReport report;
    for (UserType type : kAllUserTypes) {
        CausalRow row;
        row.user_type = type;
        row.baseline = entailed_validity(model_for(models, type), scenes, cfg.thetas_per_scene,
                                         cfg.seed, cfg.bootstrap_samples);
        for (ObjectKind kind : kAllKinds) {
            CausalCell cell;
            cell.intervention = Intervention::add_symbol(kind);
            cell.dist = intervene_symbol(model_for(models, type), scenes, kind, cfg).second;
            fill_delta(cell, row.baseline, cfg);
            row.cells.push_back(std::move(cell));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

bool direction_structure_ok(const CausalReport& report) {
    for (const CausalRow& row : report.rows) {
        for (const CausalCell& cell : row.cells) {
            const bool is_glass = cell.intervention.symbol == ObjectKind::Glass;
            bool expect_flag = false;
            switch (row.user_type) {
                case UserType::Careful: expect_flag = true; break;
                case UserType::Normal: expect_flag = is_glass; break;
                case UserType::Aggressive: expect_flag = false; break;
            }
            if (cell.significant != expect_flag) return false;
            if (expect_flag && cell.delta >= 0.0) return false;
        }
    }
    return true;
}

void write_causal_csv(const CausalReport& report, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << "user_type,intervention,mean,ci_low,ci_high,delta_vs_baseline,significant\n";
    char buf[256];
    auto emit = [&](UserType type, const std::string& label, const EntailedDistribution& d,
                    double delta, bool sig) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%.6f,%.6f,%.6f,%s\n", to_string(type),
                      label.c_str(), d.mean, d.ci_low, d.ci_high, delta, sig ? "true" : "false");
        os << buf;
    };
    for (const CausalRow& row : report.rows) {
        emit(row.user_type, "none", row.baseline, 0.0, false);
        for (const CausalCell& cell : row.cells)
            emit(row.user_type, cell.intervention.label(), cell.dist, cell.delta, cell.significant);
    }
    if (!os.good()) throw IoError("write failed for " + path.string());
}

std::string render_causal_table(const CausalReport& report) {
    std::ostringstream os;
    os << "user type   | no intervention";
    for (ObjectKind kind : kAllKinds) {
        os << " | " << to_string(kind);
    }
    os << "\n";
    char buf[64];
    for (const CausalRow& row : report.rows) {
        std::snprintf(buf, sizeof buf, "%-11s |            %.2f", to_string(row.user_type),
                      row.baseline.mean);
        os << buf;
        for (const CausalCell& cell : row.cells) {
            std::snprintf(buf, sizeof buf, " | %.2f%s", cell.dist.mean,
                          cell.significant ? "*" : " ");
            os << buf;
        }
        os << "\n";
    }
    os << "(* = significant change vs no intervention)\n";
    return os.str();
}

}  // namespace speclearn
