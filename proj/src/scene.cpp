#include "speclearn/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "speclearn/errors.hpp"
#include "speclearn/io/png.hpp"
#include "speclearn/rng.hpp"
#include "speclearn/trajectory.hpp"

namespace speclearn {

namespace {

using nlohmann::json;

constexpr double kTestHueShift = 0.12;
constexpr double kTestRadiusScale = 0.9;
constexpr int kFeasibilityGrid = 21;
constexpr int kMaxSceneRegens = 200;

struct KindSpec {
    Rgb color;
    double rlo, rhi;
};

const KindSpec& kind_spec(ObjectKind kind) {
    static const KindSpec specs[] = {
        /* Bowl    */ {{0.55, 0.35, 0.20}, 0.07, 0.11},
        /* Plate   */ {{0.75, 0.75, 0.78}, 0.10, 0.16},
        /* Cutlery */ {{0.60, 0.60, 0.62}, 0.08, 0.12},
        /* Glass   */ {{0.25, 0.45, 0.85}, 0.04, 0.07},
    };
    return specs[static_cast<int>(kind)];
}

Rgb shift_hue(const Rgb& in, double offset) {
    const double mx = std::max({in.r, in.g, in.b});
    const double mn = std::min({in.r, in.g, in.b});
    const double d = mx - mn;
    double h = 0.0;
    if (d > 0.0) {
        if (mx == in.r)
            h = std::fmod((in.g - in.b) / d, 6.0);
        else if (mx == in.g)
            h = (in.b - in.r) / d + 2.0;
        else
            h = (in.r - in.g) / d + 4.0;
        h /= 6.0;
        if (h < 0.0) h += 1.0;
    }
    const double s = mx <= 0.0 ? 0.0 : d / mx;
    const double v = mx;

    h = std::fmod(h + offset, 1.0);
    const double c = v * s;
    const double hp = h * 6.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0.0, g = 0.0, b = 0.0;
    switch (static_cast<int>(hp)) {
        case 0: r = c, g = x; break;
        case 1: r = x, g = c; break;
        case 2: g = c, b = x; break;
        case 3: g = x, b = c; break;
        case 4: r = x, b = c; break;
        default: r = c, b = x; break;
    }
    const double m = v - c;
    return {r + m, g + m, b + m};
}

bool placement_ok(const std::vector<SceneObject>& placed, const Vec2& center, double radius) {
    if (center.x - radius < 0.0 || center.x + radius > 1.0 || center.y - radius < 0.0 ||
        center.y + radius > 1.0)
        return false;
    if ((center - kPathStart).norm() <= radius + kEndpointClearRadius) return false;
    if ((center - kPathEnd).norm() <= radius + kEndpointClearRadius) return false;
    for (const auto& o : placed)
        if ((center - o.center).norm() <= radius + o.radius) return false;
    return true;
}

/// Draws one object of the given kind (or a random kind) until it fits.
SceneObject place_object(Rng& rng, const std::vector<SceneObject>& placed,
                         std::optional<ObjectKind> fixed_kind, Split variant) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
        SceneObject obj;
        obj.kind = fixed_kind ? *fixed_kind : kAllKinds[rng.index(4)];
        obj.variant = variant;
        auto [rlo, rhi] = radius_range(obj.kind, variant);
        obj.radius = rng.uniform(rlo, rhi);
        obj.angle = obj.kind == ObjectKind::Cutlery ? rng.uniform(0.0, 3.14159265358979323846) : 0.0;
        obj.center = {rng.uniform(obj.radius, 1.0 - obj.radius),
                      rng.uniform(obj.radius, 1.0 - obj.radius)};
        if (placement_ok(placed, obj.center, obj.radius)) return obj;
    }
    throw PlacementFailure("could not place object after " + std::to_string(kPlacementAttempts) +
                           " attempts");
}

/// A valid path must exist for the strictest user type; probed on a coarse
/// control-point grid.
bool careful_feasible(const std::vector<SceneObject>& objects) {
    for (int i = 0; i < kFeasibilityGrid; ++i)
        for (int j = 0; j < kFeasibilityGrid; ++j) {
            const Vec2 theta{static_cast<double>(i) / (kFeasibilityGrid - 1),
                             static_cast<double>(j) / (kFeasibilityGrid - 1)};
            if (min_curve_clearance(objects, theta, kOracleCurveSamples, false) >=
                kClearanceThreshold)
                return true;
        }
    return false;
}

json scene_to_json(const Scene& scene) {
    json objs = json::array();
    for (const auto& o : scene.objects) {
        objs.push_back({{"kind", to_string(o.kind)},
                        {"cx", o.center.x},
                        {"cy", o.center.y},
                        {"radius", o.radius},
                        {"angle", o.angle},
                        {"variant", to_string(o.variant)}});
    }
    return json{{"version", 1},
                {"seed", scene.seed},
                {"split", to_string(scene.split)},
                {"objects", std::move(objs)}};
}

Scene scene_from_json(const json& j) {
    if (!j.is_object() || !j.contains("version") || j.at("version").get<int>() != 1)
        throw SchemaError("scene.json: unsupported schema version");
    Scene scene;
    scene.seed = j.at("seed").get<uint64_t>();
    scene.split = split_from_string(j.at("split").get<std::string>());
    for (const auto& jo : j.at("objects")) {
        SceneObject o;
        o.kind = object_kind_from_string(jo.at("kind").get<std::string>());
        o.center = {jo.at("cx").get<double>(), jo.at("cy").get<double>()};
        o.radius = jo.at("radius").get<double>();
        o.angle = jo.at("angle").get<double>();
        o.variant = split_from_string(jo.at("variant").get<std::string>());
        scene.objects.push_back(o);
    }
    return scene;
}

}  // namespace

const char* to_string(ObjectKind kind) {
    switch (kind) {
        case ObjectKind::Bowl: return "bowl";
        case ObjectKind::Plate: return "plate";
        case ObjectKind::Cutlery: return "cutlery";
        case ObjectKind::Glass: return "glass";
    }
    return "?";
}

const char* to_string(Split split) { return split == Split::Train ? "train" : "test"; }

ObjectKind object_kind_from_string(const std::string& s) {
    for (ObjectKind k : kAllKinds)
        if (s == to_string(k)) return k;
    throw SchemaError("unknown object kind: " + s);
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "test") return Split::Test;
    throw SchemaError("unknown split: " + s);
}

Rgb background_color() { return {0.96, 0.96, 0.94}; }

Rgb object_color(ObjectKind kind, Split variant) {
    const Rgb& base = kind_spec(kind).color;
    return variant == Split::Train ? base : shift_hue(base, kTestHueShift);
}

std::pair<double, double> radius_range(ObjectKind kind, Split variant) {
    const KindSpec& spec = kind_spec(kind);
    const double s = variant == Split::Train ? 1.0 : kTestRadiusScale;
    return {spec.rlo * s, spec.rhi * s};
}

double object_signed_distance(const SceneObject& obj, const Vec2& p) {
    if (obj.kind == ObjectKind::Cutlery)
        return rect_signed_distance(p, obj.center, obj.angle, obj.radius,
                                    obj.radius / kCutleryAspect);
    return disk_signed_distance(p, obj.center, obj.radius);
}

double min_curve_clearance(const std::vector<SceneObject>& objects, const Vec2& theta,
                           int samples, bool glasses_only) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<Vec2> pts(static_cast<size_t>(samples) + 1);
    for (int j = 0; j <= samples; ++j)
        pts[j] = bezier_point(theta, static_cast<double>(j) / samples);
    for (const auto& obj : objects) {
        if (glasses_only && obj.kind != ObjectKind::Glass) continue;
        for (const auto& p : pts) best = std::min(best, object_signed_distance(obj, p));
    }
    return best;
}

Scene generate_scene(uint64_t seed, Split split, std::optional<int> object_count) {
    if (object_count && (*object_count < kSceneMinObjects || *object_count > kSceneMaxObjects))
        throw std::invalid_argument("object_count must be in [2,6]");

    Rng rng(derive_seed(seed, {static_cast<uint64_t>(split == Split::Test ? 1 : 0),
                               object_count ? static_cast<uint64_t>(*object_count) : 777ULL}));
    for (int regen = 0; regen < kMaxSceneRegens; ++regen) {
        const int n = object_count
                          ? *object_count
                          : static_cast<int>(rng.range(kSceneMinObjects, kSceneMaxObjects));
        Scene scene;
        scene.seed = seed;
        scene.split = split;
        for (int i = 0; i < n; ++i)
            scene.objects.push_back(place_object(rng, scene.objects, std::nullopt, split));
        if (careful_feasible(scene.objects)) return scene;
        // no careful-valid control point exists; draw a fresh scene
    }
    throw PlacementFailure("no feasible scene found");
}

Image render_scene(const Scene& scene) {
    Image img;
    const Rgb bg = background_color();
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            img.at(r, c, 0) = bg.r;
            img.at(r, c, 1) = bg.g;
            img.at(r, c, 2) = bg.b;
        }
    for (const auto& obj : scene.objects) {
        const Rgb col = object_color(obj.kind, obj.variant);
        const int r0 = std::max(0, static_cast<int>((obj.center.y - obj.radius) * img.height) - 1);
        const int r1 = std::min(img.height - 1,
                                static_cast<int>((obj.center.y + obj.radius) * img.height) + 1);
        const int c0 = std::max(0, static_cast<int>((obj.center.x - obj.radius) * img.width) - 1);
        const int c1 =
            std::min(img.width - 1, static_cast<int>((obj.center.x + obj.radius) * img.width) + 1);
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c) {
                const Vec2 p{(c + 0.5) / img.width, (r + 0.5) / img.height};
                if (object_signed_distance(obj, p) <= 0.0) {
                    img.at(r, c, 0) = col.r;
                    img.at(r, c, 1) = col.g;
                    img.at(r, c, 2) = col.b;
                }
            }
    }
    return img;
}

Scene augment_scene(const Scene& scene, ObjectKind kind, uint64_t seed) {
    if (static_cast<int>(scene.objects.size()) >= kSceneMaxObjects)
        throw PlacementFailure("scene already holds the maximum number of objects");
    Rng rng(derive_seed(seed, {0xA06ULL, static_cast<uint64_t>(kind)}));
    Scene out = scene;
    out.objects.push_back(place_object(rng, out.objects, kind, scene.split));
    return out;
}

void scene_to_files(const Scene& scene, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string());

    std::ofstream js(dir / "scene.json");
    if (!js) throw IoError("cannot write " + (dir / "scene.json").string());
    js << scene_to_json(scene).dump(1) << '\n';
    if (!js.good()) throw IoError("write failed for scene.json");

    const Image img = render_scene(scene);
    std::vector<uint8_t> bytes(img.pixels.size());
    for (size_t i = 0; i < img.pixels.size(); ++i)
        bytes[i] = static_cast<uint8_t>(std::lround(img.pixels[i] * 255.0));
    write_png_rgb8(dir / "scene.png", img.height, img.width, bytes);
}

Scene scene_from_files(const std::filesystem::path& dir) {
    std::ifstream js(dir / "scene.json");
    if (!js) throw IoError("cannot read " + (dir / "scene.json").string());
    json j = json::parse(js, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw SchemaError("scene.json: not valid JSON");
    try {
        return scene_from_json(j);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("scene.json: ") + e.what());
    }
}

}  // namespace speclearn
