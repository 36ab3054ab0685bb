#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <limits>

#include "speclearn/scene.hpp"
#include "speclearn/trajectory.hpp"

namespace speclearn::testing {

/// Brute-force validity: rasterizes the curve far more densely than the
/// production oracle and checks footprint distances directly.
inline bool brute_force_validity(const Scene& scene, const Vec2& theta, UserType type,
                                 int samples = 10000) {
    if (type == UserType::Aggressive) return true;
    const bool glasses_only = type == UserType::Normal;
    double min_clear = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= samples; ++j) {
        const Vec2 p = bezier_point(theta, static_cast<double>(j) / samples);
        for (const auto& obj : scene.objects) {
            if (glasses_only && obj.kind != ObjectKind::Glass) continue;
            min_clear = std::min(min_clear, object_signed_distance(obj, p));
        }
    }
    return min_clear >= kClearanceThreshold;
}

/// Quadratic Bezier curves stay inside the convex hull of their control
/// polygon; membership check used as a property oracle.
inline bool in_control_hull(const Vec2& p, const Vec2& theta, double tol = 1e-12) {
    const Vec2 a = kPathStart, b = theta, c = kPathEnd;
    const double d = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
    if (std::abs(d) < 1e-15) {
        // degenerate triangle: check the segment instead
        const Vec2 ab = c - a;
        const double t = std::clamp((p - a).dot(ab) / ab.dot(ab), 0.0, 1.0);
        return (p - (a + t * ab)).norm() <= 1e-9;
    }
    const double l1 = ((b.y - c.y) * (p.x - c.x) + (c.x - b.x) * (p.y - c.y)) / d;
    const double l2 = ((c.y - a.y) * (p.x - c.x) + (a.x - c.x) * (p.y - c.y)) / d;
    const double l3 = 1.0 - l1 - l2;
    return l1 >= -tol && l2 >= -tol && l3 >= -tol;
}

/// Re-checks every scene invariant from first principles.
inline bool scene_invariants_ok(const Scene& scene) {
    const auto& objs = scene.objects;
    if (objs.size() < 2 || objs.size() > 6) return false;
    for (size_t i = 0; i < objs.size(); ++i) {
        const auto& o = objs[i];
        if (o.center.x - o.radius < 0 || o.center.x + o.radius > 1 || o.center.y - o.radius < 0 ||
            o.center.y + o.radius > 1)
            return false;
        if ((o.center - kPathStart).norm() <= o.radius + kEndpointClearRadius) return false;
        if ((o.center - kPathEnd).norm() <= o.radius + kEndpointClearRadius) return false;
        auto [rlo, rhi] = radius_range(o.kind, o.variant);
        if (o.radius < rlo - 1e-12 || o.radius > rhi + 1e-12) return false;
        for (size_t j = i + 1; j < objs.size(); ++j)
            if ((o.center - objs[j].center).norm() <= o.radius + objs[j].radius) return false;
    }
    return true;
}

}  // namespace speclearn::testing
