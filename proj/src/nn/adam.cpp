#include "speclearn/nn/adam.hpp"

#include <cmath>

#include "speclearn/errors.hpp"

namespace speclearn::nn {

AdamState::AdamState(const ParamStore& params) {
    for (const auto& [path, p] : params)
        moments_.emplace(path, std::make_pair(Tensor::zeros(p.value.shape),
                                              Tensor::zeros(p.value.shape)));
}

void AdamState::step(ParamStore& params, const AdamConfig& cfg) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (auto& [path, p] : params) {
        auto it = moments_.find(path);
        if (it == moments_.end()) throw std::logic_error("adam: unknown param " + path);
        Tensor& m = it->second.first;
        Tensor& v = it->second.second;
        for (size_t i = 0; i < p.value.numel(); ++i) {
            const double g = p.grad.data[i];
            m.data[i] = cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * g;
            v.data[i] = cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = m.data[i] / bc1;
            const double vhat = v.data[i] / bc2;
            p.value.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
    params.zero_grads();
}

void AdamState::save(const std::filesystem::path& path) const {
    ParamStore box;
    box.add("step", Tensor::scalar(static_cast<double>(t_)));
    for (const auto& [name, mv] : moments_) {
        box.add("m/" + name, mv.first);
        box.add("v/" + name, mv.second);
    }
    box.save(path);
}

AdamState AdamState::load(const std::filesystem::path& path, const ParamStore& params) {
    ParamStore box = ParamStore::load(path);
    AdamState state;
    state.t_ = static_cast<int64_t>(box.at("step").value.data[0]);
    for (const auto& [name, p] : params) {
        if (!box.contains("m/" + name) || !box.contains("v/" + name))
            throw SchemaError("optimizer state missing moments for " + name);
        Tensor m = box.at("m/" + name).value;
        Tensor v = box.at("v/" + name).value;
        if (m.shape != p.value.shape || v.shape != p.value.shape)
            throw SchemaError("optimizer state shape mismatch for " + name);
        state.moments_.emplace(name, std::make_pair(std::move(m), std::move(v)));
    }
    return state;
}

}  // namespace speclearn::nn
