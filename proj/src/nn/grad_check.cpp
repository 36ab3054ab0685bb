#include "speclearn/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "speclearn/rng.hpp"

namespace speclearn::nn {

double grad_check(const std::function<double()>& loss_fn, ParamStore& params, int sample_coords,
                  double h, uint64_t seed) {
    params.zero_grads();
    loss_fn();

    struct Coord {
        Param* param;
        size_t index;
        double analytic;
    };
    std::vector<Coord> coords;
    for (auto& [path, p] : params)
        for (size_t i = 0; i < p.value.numel(); ++i) coords.push_back({&p, i, p.grad.data[i]});

    if (static_cast<size_t>(sample_coords) < coords.size()) {
        Rng rng(derive_seed(seed, {coords.size()}));
        // partial Fisher-Yates: the first sample_coords entries become the probe set
        for (int i = 0; i < sample_coords; ++i) {
            const size_t j = i + rng.index(coords.size() - i);
            std::swap(coords[i], coords[j]);
        }
        coords.resize(static_cast<size_t>(sample_coords));
    }

    double max_err = 0.0;
    for (const Coord& c : coords) {
        double& w = c.param->value.data[c.index];
        const double w0 = w;
        w = w0 + h;
        const double lp = loss_fn();
        w = w0 - h;
        const double lm = loss_fn();
        w = w0;
        const double numeric = (lp - lm) / (2.0 * h);
        const double err =
            std::abs(c.analytic - numeric) / std::max(1e-8, std::abs(c.analytic) + std::abs(numeric));
        max_err = std::max(max_err, err);
    }
    params.zero_grads();
    return max_err;
}

}  // namespace speclearn::nn
