#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace speclearn {

/// Linearly interpolated sample quantile, q in [0,1].
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty input");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

inline double mean_of(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

}  // namespace speclearn
