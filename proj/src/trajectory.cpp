#include "speclearn/trajectory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "speclearn/errors.hpp"
#include "speclearn/rng.hpp"

namespace speclearn {

const char* to_string(UserType type) {
    switch (type) {
        case UserType::Careful: return "careful";
        case UserType::Normal: return "normal";
        case UserType::Aggressive: return "aggressive";
    }
    return "?";
}

UserType user_type_from_string(const std::string& s) {
    for (UserType t : kAllUserTypes)
        if (s == to_string(t)) return t;
    throw SchemaError("unknown user type: " + s);
}

Vec2 bezier_eval(const ControlPoint& theta, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("bezier_eval: t outside [0,1]");
    return bezier_point(theta, t);
}

Trajectory sample_trajectory(const ControlPoint& theta, int T) {
    if (T < 2) throw std::invalid_argument("sample_trajectory: T must be >= 2");
    Trajectory tr;
    tr.points.reserve(static_cast<size_t>(T) + 1);
    for (int j = 0; j <= T; ++j)
        tr.points.push_back(bezier_point(theta, static_cast<double>(j) / T));
    return tr;
}

ControlPoint bezier_fit(const Trajectory& trajectory) {
    const auto& pts = trajectory.points;
    if (pts.size() < 3) throw std::invalid_argument("bezier_fit: need at least 3 points");
    if ((pts.front() - kPathStart).norm() > 1e-9 || (pts.back() - kPathEnd).norm() > 1e-9)
        throw std::invalid_argument("bezier_fit: endpoints do not match the task endpoints");

    // theta = sum_j w_j (p_j - (1-t_j)^2 p0 - t_j^2 p2) / sum_j w_j^2,
    // w_j = 2 (1-t_j) t_j -- the least-squares control point.
    const size_t T = pts.size() - 1;
    Vec2 num{0.0, 0.0};
    double den = 0.0;
    for (size_t j = 0; j <= T; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(T);
        const double u = 1.0 - t;
        const double w = 2.0 * u * t;
        num = num + w * (pts[j] - u * u * kPathStart - t * t * kPathEnd);
        den += w * w;
    }
    return num * (1.0 / den);
}

bool oracle_validity(const Scene& scene, const ControlPoint& theta, UserType user_type) {
    switch (user_type) {
        case UserType::Aggressive: return true;
        case UserType::Careful:
            return min_curve_clearance(scene.objects, theta, kOracleCurveSamples, false) >=
                   kClearanceThreshold;
        case UserType::Normal:
            return min_curve_clearance(scene.objects, theta, kOracleCurveSamples, true) >=
                   kClearanceThreshold;
    }
    return false;
}

std::vector<Demonstration> synthesize_demonstrations(const Scene& scene, UserType user_type,
                                                     int count, uint64_t seed) {
    if (count < 1) throw std::invalid_argument("synthesize_demonstrations: count must be >= 1");
    constexpr int kMaxDraws = 10000;

    Rng rng(derive_seed(seed, {0xDE30ULL, static_cast<uint64_t>(user_type)}));
    std::vector<Demonstration> demos;
    demos.reserve(static_cast<size_t>(count));

    if (user_type == UserType::Aggressive) {
        // nothing breaks the aggressive type, so every draw is a valid demo
        for (int i = 0; i < count; ++i)
            demos.push_back({{rng.uniform(), rng.uniform()}, true});
        return demos;
    }

    int need_valid = (count + 1) / 2;
    int need_invalid = count / 2;
    for (int draw = 0; draw < kMaxDraws && (need_valid > 0 || need_invalid > 0); ++draw) {
        const ControlPoint theta{rng.uniform(), rng.uniform()};
        const bool valid = oracle_validity(scene, theta, user_type);
        if (valid && need_valid > 0) {
            demos.push_back({theta, true});
            --need_valid;
        } else if (!valid && need_invalid > 0) {
            demos.push_back({theta, false});
            --need_invalid;
        }
    }
    if (need_valid > 0 || need_invalid > 0)
        throw SynthesisFailure(std::string("could not synthesize a ") +
                               (need_valid > 0 ? "valid" : "invalid") + " demonstration for " +
                               to_string(user_type) + " within 10000 draws");
    return demos;
}

}  // namespace speclearn
