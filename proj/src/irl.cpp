#include "speclearn/irl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "speclearn/errors.hpp"
#include "speclearn/nn/adam.hpp"
#include "speclearn/rng.hpp"

namespace speclearn {

RewardModel::RewardModel(UserType type) : user_type_(type) {
    params_.add("w", nn::Tensor({kIrlFeatureDim}));
    params_.add("b", nn::Tensor({1}));
}

std::vector<double> RewardModel::trajectory_feature(const nn::Tensor& image, const Vec2& theta) {
    if (image.ndim() != 3 || image.dim(0) != 3)
        throw std::invalid_argument("irl: image tensor must be [3,H,W]");
    const int H = image.dim(1), W = image.dim(2);
    const Rgb bg = background_color();
    const double bgv[3] = {bg.r, bg.g, bg.b};
    const int half = kIrlPatchSize / 2;

    std::vector<double> feat(kIrlFeatureDim, 0.0);
    const Trajectory tr = sample_trajectory(theta, kIrlCurveSamples);
    for (const Vec2& p : tr.points) {
        const int pr = std::clamp(static_cast<int>(p.y * H), 0, H - 1);
        const int pc = std::clamp(static_cast<int>(p.x * W), 0, W - 1);
        size_t f = 0;
        for (int dy = -half; dy <= half; ++dy)
            for (int dx = -half; dx <= half; ++dx) {
                const int r = pr + dy, c = pc + dx;
                const bool inside = r >= 0 && r < H && c >= 0 && c < W;
                for (int ch = 0; ch < 3; ++ch, ++f)
                    feat[f] += inside ? image.data[(static_cast<size_t>(ch) * H + r) * W + c]
                                      : bgv[ch];
            }
    }
    const double inv = 1.0 / static_cast<double>(tr.points.size());
    for (double& v : feat) v *= inv;
    return feat;
}

double RewardModel::score(const nn::Tensor& image, const Vec2& theta) const {
    const std::vector<double> feat = trajectory_feature(image, theta);
    const nn::Tensor& w = params_.at("w").value;
    double s = params_.at("b").value.data[0];
    for (int i = 0; i < kIrlFeatureDim; ++i) s += w.data[i] * feat[i];
    return 1.0 / (1.0 + std::exp(-s));
}

bool RewardModel::classify(const nn::Tensor& image, const Vec2& theta) const {
    return score(image, theta) >= 0.5;
}

void RewardModel::save_checkpoint(const std::filesystem::path& stem) const {
    std::filesystem::path p = stem;
    p += ".spc";
    params_.save(p);
    std::filesystem::path j = stem;
    j += ".json";
    std::ofstream os(j);
    if (!os) throw IoError("cannot write " + j.string());
    os << nlohmann::json{{"kind", "irl"}, {"user_type", to_string(user_type_)}}.dump(1) << '\n';
}

RewardModel RewardModel::load_checkpoint(const std::filesystem::path& stem) {
    std::filesystem::path j = stem;
    j += ".json";
    std::ifstream is(j);
    if (!is) throw IoError("cannot read " + j.string());
    nlohmann::json sidecar = nlohmann::json::parse(is, nullptr, /*allow_exceptions=*/false);
    if (sidecar.is_discarded() || sidecar.value("kind", "") != "irl")
        throw SchemaError("not an irl checkpoint: " + j.string());
    RewardModel model(user_type_from_string(sidecar.at("user_type").get<std::string>()));
    std::filesystem::path p = stem;
    p += ".spc";
    nn::ParamStore loaded = nn::ParamStore::load(p);
    if (!loaded.contains("w") || !loaded.contains("b"))
        throw SchemaError("irl checkpoint missing parameters");
    model.params_ = std::move(loaded);
    return model;
}

TrainLog train_irl(RewardModel& model, const std::vector<TrainScene>& scenes,
                   const IrlConfig& cfg) {
    struct Example {
        std::vector<double> feat;
        double label;
    };
    std::vector<Example> examples;
    for (const auto& s : scenes) {
        if (s.user_type != model.user_type())
            throw std::invalid_argument("train_irl: demonstration user type mismatch");
        for (const auto& d : s.demos)
            examples.push_back(
                {RewardModel::trajectory_feature(s.image, d.theta), d.valid ? 1.0 : 0.0});
    }
    if (examples.empty()) throw std::invalid_argument("train_irl: empty dataset");

    nn::AdamState opt(model.params_);
    nn::AdamConfig acfg;
    acfg.lr = cfg.lr;
    nn::Tensor& w = model.params_.at("w").value;
    nn::Tensor& b = model.params_.at("b").value;

    TrainLog log;
    std::vector<int> order(examples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng(derive_seed(cfg.seed, {0x12C1ULL, static_cast<uint64_t>(epoch)}));
        rng.shuffle(order);
        double loss_sum = 0.0;
        int correct = 0;
        size_t pos = 0;
        while (pos < order.size()) {
            const size_t batch_end = std::min(order.size(), pos + static_cast<size_t>(cfg.batch_size));
            const double inv_b = 1.0 / static_cast<double>(batch_end - pos);
            nn::Tensor& gw = model.params_.at("w").grad;
            nn::Tensor& gb = model.params_.at("b").grad;
            for (; pos < batch_end; ++pos) {
                const Example& ex = examples[static_cast<size_t>(order[pos])];
                double logit = b.data[0];
                for (int i = 0; i < kIrlFeatureDim; ++i) logit += w.data[i] * ex.feat[i];
                const double p = 1.0 / (1.0 + std::exp(-logit));
                const double pc = std::clamp(p, 1e-7, 1.0 - 1e-7);
                loss_sum += -(ex.label * std::log(pc) + (1.0 - ex.label) * std::log(1.0 - pc));
                if ((p >= 0.5) == (ex.label >= 0.5)) ++correct;
                const double g = (p - ex.label) * inv_b;  // d BCE / d logit
                for (int i = 0; i < kIrlFeatureDim; ++i) gw.data[i] += g * ex.feat[i];
                gb.data[0] += g;
            }
            opt.step(model.params_, acfg);
        }
        EpochStats stats;
        stats.epoch = epoch;
        stats.loss.cls = loss_sum / static_cast<double>(examples.size());
        stats.loss.total = stats.loss.cls;
        stats.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
        log.push_back(stats);
    }
    return log;
}

}  // namespace speclearn
