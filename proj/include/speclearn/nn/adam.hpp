#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <utility>

#include "speclearn/nn/param_store.hpp"

namespace speclearn::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Per-parameter first/second moments plus the shared step counter.
class AdamState {
public:
    AdamState() = default;
    explicit AdamState(const ParamStore& params);

    int64_t step_count() const { return t_; }

    /// Standard Adam update with bias correction; zeroes the gradients
    /// afterwards.
    void step(ParamStore& params, const AdamConfig& cfg);

    void save(const std::filesystem::path& path) const;
    static AdamState load(const std::filesystem::path& path, const ParamStore& params);

private:
    std::map<std::string, std::pair<Tensor, Tensor>> moments_;  // (m, v)
    int64_t t_ = 0;
};

}  // namespace speclearn::nn
