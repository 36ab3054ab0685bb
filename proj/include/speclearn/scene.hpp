#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speclearn/geometry.hpp"

namespace speclearn {

/// The four symbol kinds found on the tabletop.
enum class ObjectKind { Bowl, Plate, Cutlery, Glass };
inline constexpr ObjectKind kAllKinds[] = {ObjectKind::Bowl, ObjectKind::Plate,
                                           ObjectKind::Cutlery, ObjectKind::Glass};

enum class Split { Train, Test };

inline constexpr int kImageSize = 100;
inline constexpr int kSceneMinObjects = 2;
inline constexpr int kSceneMaxObjects = 6;
inline constexpr int kPlacementAttempts = 1000;
/// cutlery long-axis : short-axis ratio
inline constexpr double kCutleryAspect = 6.0;

struct Rgb {
    double r = 0.0, g = 0.0, b = 0.0;
};

struct SceneObject {
    ObjectKind kind = ObjectKind::Bowl;
    Vec2 center;
    /// Disk radius; for cutlery the half-length of the long axis.
    double radius = 0.0;
    /// Orientation in radians; only meaningful for cutlery.
    double angle = 0.0;
    Split variant = Split::Train;

    bool operator==(const SceneObject&) const = default;
};

struct Scene {
    std::vector<SceneObject> objects;
    uint64_t seed = 0;
    Split split = Split::Train;

    bool operator==(const Scene&) const = default;
};

/// 100x100 RGB raster with intensities in [0,1], row-major HxWx3.
struct Image {
    int height = kImageSize;
    int width = kImageSize;
    std::vector<double> pixels;

    Image() : pixels(static_cast<size_t>(kImageSize) * kImageSize * 3, 0.0) {}
    Image(int h, int w) : height(h), width(w), pixels(static_cast<size_t>(h) * w * 3, 0.0) {}

    double& at(int r, int c, int ch) { return pixels[(static_cast<size_t>(r) * width + c) * 3 + ch]; }
    double at(int r, int c, int ch) const { return pixels[(static_cast<size_t>(r) * width + c) * 3 + ch]; }
};

const char* to_string(ObjectKind kind);
const char* to_string(Split split);
ObjectKind object_kind_from_string(const std::string& s);
Split split_from_string(const std::string& s);

Rgb background_color();
Rgb object_color(ObjectKind kind, Split variant);
/// Admissible radius interval for a kind; the test variant uses the same
/// geometry family scaled down.
std::pair<double, double> radius_range(ObjectKind kind, Split variant);

/// Signed distance from a point to the object footprint (negative inside).
double object_signed_distance(const SceneObject& obj, const Vec2& p);

/// Minimum signed clearance between the Bezier curve for `theta`, sampled at
/// `samples`+1 parameter values, and the object footprints. With
/// `glasses_only` every non-glass object is ignored.
double min_curve_clearance(const std::vector<SceneObject>& objects, const Vec2& theta,
                           int samples, bool glasses_only);

/// Deterministically generates a scene satisfying all invariants
/// (non-overlap, endpoint clearance, at least one careful-valid control
/// point). `object_count` empty means a random count in [2,6].
Scene generate_scene(uint64_t seed, Split split, std::optional<int> object_count = std::nullopt);

/// Hard-edged top-down raster; objects painted in list order.
Image render_scene(const Scene& scene);

/// Returns the scene plus one new object of `kind`, placed by rejection
/// sampling so all invariants still hold.
Scene augment_scene(const Scene& scene, ObjectKind kind, uint64_t seed);

/// Writes scene.json and scene.png into `dir` (created if needed).
void scene_to_files(const Scene& scene, const std::filesystem::path& dir);
Scene scene_from_files(const std::filesystem::path& dir);

}  // namespace speclearn
