#pragma once

#include <algorithm>
#include <cmath>

namespace speclearn {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

/// Fixed task endpoints: carry from the bottom-left to the top-right corner
/// of the normalized table.
inline constexpr Vec2 kPathStart{0.1, 0.1};
inline constexpr Vec2 kPathEnd{0.9, 0.9};

/// Object footprints must keep this distance from both endpoints so a path
/// always exists.
inline constexpr double kEndpointClearRadius = 0.08;

/// Quadratic Bezier with one free control point.
inline Vec2 bezier_point(const Vec2& ctrl, double t) {
    const double u = 1.0 - t;
    return u * u * kPathStart + 2.0 * u * t * ctrl + t * t * kPathEnd;
}

/// Signed distance from p to a disk (negative inside).
inline double disk_signed_distance(const Vec2& p, const Vec2& center, double radius) {
    return (p - center).norm() - radius;
}

/// Signed distance from p to a rectangle centered at `center`, rotated by
/// `angle`, with half extents (half_len, half_wid). Negative inside.
inline double rect_signed_distance(const Vec2& p, const Vec2& center, double angle,
                                   double half_len, double half_wid) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Vec2 d = p - center;
    const double u = std::abs(c * d.x + s * d.y) - half_len;
    const double v = std::abs(-s * d.x + c * d.y) - half_wid;
    const double ox = std::max(u, 0.0);
    const double oy = std::max(v, 0.0);
    return std::sqrt(ox * ox + oy * oy) + std::min(std::max(u, v), 0.0);
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace speclearn
