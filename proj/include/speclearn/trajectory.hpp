#pragma once

#include <cstdint>
#include <vector>

#include "speclearn/geometry.hpp"
#include "speclearn/scene.hpp"

namespace speclearn {

using ControlPoint = Vec2;

/// Control points may leave the unit square transiently during refinement
/// but stay inside this box.
inline constexpr double kControlClampLo = -0.25;
inline constexpr double kControlClampHi = 1.25;

/// Validity oracle parameters: minimum clearance in normalized units and the
/// sampling density of the dense curve check.
inline constexpr double kClearanceThreshold = 0.03;
inline constexpr int kOracleCurveSamples = 200;

inline constexpr int kDefaultTrajectorySamples = 50;

enum class UserType { Careful, Normal, Aggressive };
inline constexpr UserType kAllUserTypes[] = {UserType::Careful, UserType::Normal,
                                             UserType::Aggressive};
const char* to_string(UserType type);
UserType user_type_from_string(const std::string& s);

struct Trajectory {
    std::vector<Vec2> points;  // points[0] == kPathStart, points
                               // [T] == kPathEnd, T >= 2
};

struct Demonstration {
    ControlPoint theta;
    bool valid = false;

    bool operator==(const Demonstration&) const = default;
};

/// B(t) for the quadratic Bezier through the fixed endpoints. t must lie in
/// [0,1].
Vec2 bezier_eval(const ControlPoint& theta, double t);

/// Samples the curve at t = j/T for j = 0..T.
Trajectory sample_trajectory(const ControlPoint& theta, int T = kDefaultTrajectorySamples);

/// Least-squares control point for a trajectory whose endpoints match the
/// fixed task endpoints within 1e-9.
ControlPoint bezier_fit(const Trajectory& trajectory);

/// Ground-truth validity: careful users keep clear of everything, normal
/// users only of glasses, aggressive users of nothing.
bool oracle_validity(const Scene& scene, const ControlPoint& theta, UserType user_type);

/// Rejection-samples control points until the label buckets demanded by the
/// user type are full: ceil(count/2) valid + floor(count/2) invalid for
/// careful/normal, all valid for aggressive.
std::vector<Demonstration> synthesize_demonstrations(const Scene& scene, UserType user_type,
                                                     int count, uint64_t seed);

}  // namespace speclearn
