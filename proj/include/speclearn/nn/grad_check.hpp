#pragma once

#include <cstdint>
#include <functional>

#include "speclearn/nn/param_store.hpp"

namespace speclearn::nn {

/// Central finite-difference check of a scalar loss. `loss_fn` must compute
/// the loss for the current parameter values and accumulate the analytic
/// gradients into the store (the checker zeroes them first); it must be a
/// deterministic function of the parameters.
///
/// Up to `sample_coords` coordinates are probed (chosen pseudo-randomly from
/// `seed` when the store is larger). Returns the maximum relative error
/// |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
double grad_check(const std::function<double()>& loss_fn, ParamStore& params,
                  int sample_coords = 100, double h = 1e-5, uint64_t seed = 0x6fd);

}  // namespace speclearn::nn
