#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tanglemap/camera.hpp"
#include "tanglemap/depth_image.hpp"
#include "tanglemap/errors.hpp"
#include "tanglemap/gli.hpp"
#include "tanglemap/grid.hpp"

namespace tanglemap {

enum class PartShape { C, S };

inline const char* to_string(PartShape s) { return s == PartShape::C ? "C" : "S"; }

struct PartParams {
    double c_radius_mm = 55.0;  // centerline arc radius of the C part
    double c_arc_deg = 300.0;
    double s_radius_mm = 38.0;  // radius of each S lobe
    double s_arc1_deg = 170.0;
    double s_arc2_deg = 170.0;
    double wire_radius_mm = 16.0;
    int centerline_points = 48;

    void check() const {
        if (c_radius_mm <= 0 || s_radius_mm <= 0 || wire_radius_mm <= 0)
            throw InvalidParams("part radii must be positive");
        if (c_arc_deg <= 0 || c_arc_deg > 360 || s_arc1_deg <= 0 || s_arc2_deg < 0)
            throw InvalidParams("arc angles out of range");
        if (centerline_points < 8) throw InvalidParams("centerline needs >= 8 points");
    }
};

/// Rigid wire part: a tube of wire_radius swept along a polyline centerline.
/// The centerline lives in the part frame; pose maps it into camera space.
struct WirePart {
    PartShape shape = PartShape::C;
    std::vector<Vec3> centerline;
    double wire_radius = 16.0;
    RigidTransform pose;

    std::vector<Vec3> world_centerline() const {
        std::vector<Vec3> out;
        out.reserve(centerline.size());
        for (const Vec3& p : centerline) out.push_back(pose.apply(p));
        return out;
    }
};

namespace detail {

// Uniform arc-length resample of a polyline to n points (endpoints kept).
inline std::vector<Vec3> resample_polyline(const std::vector<Vec3>& pts, int n) {
    std::vector<double> cum{0.0};
    for (size_t i = 1; i < pts.size(); i++) cum.push_back(cum.back() + norm(pts[i] - pts[i - 1]));
    const double total = cum.back();
    std::vector<Vec3> out;
    out.reserve(n);
    size_t k = 1;
    for (int i = 0; i < n; i++) {
        const double target = total * i / (n - 1);
        while (k + 1 < cum.size() && cum[k] < target) k++;
        const double seg = cum[k] - cum[k - 1];
        const double t = seg > 0.0 ? (target - cum[k - 1]) / seg : 0.0;
        out.push_back(pts[k - 1] + t * (pts[k] - pts[k - 1]));
    }
    return out;
}

inline std::vector<Vec3> dense_arc(Vec3 c, double radius, double a0, double a1, int steps) {
    std::vector<Vec3> pts;
    pts.reserve(steps + 1);
    for (int i = 0; i <= steps; i++) {
        const double a = a0 + (a1 - a0) * i / steps;
        pts.push_back({c.x + radius * std::cos(a), c.y + radius * std::sin(a), 0.0});
    }
    return pts;
}

} // namespace detail

/// Build a part centerline in its own frame (xy plane). C parts are a single
/// circular arc centered on the origin; S parts append an opposite-winding
/// lobe tangent to the first. A zero second arc is exactly a C of the first
/// lobe's parameters.
inline WirePart make_part(PartShape shape, const PartParams& params, uint64_t seed = 0) {
    params.check();
    (void)seed; // parts are deterministic from params; poses carry the randomness

    constexpr int kDense = 512;
    std::vector<Vec3> raw;
    if (shape == PartShape::C) {
        raw = detail::dense_arc({0, 0, 0}, params.c_radius_mm, 0.0, deg_to_rad(params.c_arc_deg),
                                kDense);
    } else if (params.s_arc2_deg == 0.0) {
        raw = detail::dense_arc({0, 0, 0}, params.s_radius_mm, 0.0, deg_to_rad(params.s_arc1_deg),
                                kDense);
    } else {
        const double r = params.s_radius_mm;
        const double a1 = deg_to_rad(params.s_arc1_deg);
        const double a2 = deg_to_rad(params.s_arc2_deg);
        raw = detail::dense_arc({0, 0, 0}, r, 0.0, a1, kDense / 2);
        // second lobe: tangent at the joint, opposite winding sense
        const Vec3 end = raw.back();
        const Vec3 radial = normalized(end);
        const Vec3 c2 = end + r * radial;
        const double base = std::atan2(end.y - c2.y, end.x - c2.x);
        const auto lobe2 = detail::dense_arc(c2, r, base, base - a2, kDense / 2);
        raw.insert(raw.end(), lobe2.begin() + 1, lobe2.end());
    }

    WirePart part;
    part.shape = shape;
    part.wire_radius = params.wire_radius_mm;
    part.centerline = detail::resample_polyline(raw, params.centerline_points);
    return part;
}

enum class Placement { separated, overlapped, twisted, random_pile };

struct PairTruth {
    int i = 0, j = 0;
    double gli_sum = 0.0;     // closure-completed pairwise GLI sum
    int linking = 0;          // rounded linking number
    double min_distance_mm = 0.0;
    int crossing_count = 0;   // projected centerline crossings
    bool entangling = false;
    std::vector<Vec2> crossings_px;
};

struct SceneTruth {
    std::vector<WirePart> parts;
    std::vector<PairTruth> pairs;
    std::vector<int> free_part_ids;
    std::string pattern;
    uint64_t seed = 0;
    std::optional<Rect> tangled_region, free_region; // filled by annotate_truth
};

struct SceneConfig {
    int image_width = 512, image_height = 512;
    double floor_depth_mm = 1000.0;
    double view_width_mm = 560.0; // scene width covered by the image at floor depth
    double noise_sigma_mm = 1.0;
    int border_invalid_px = 2;
    PartParams part;
    int pile_count = 5;
    int max_attempts = 64;

    Intrinsics intrinsics() const {
        const double f = image_width * floor_depth_mm / view_width_mm;
        return Intrinsics::centered(f, f, image_width, image_height);
    }
};

namespace detail {

/// Min distance between polyline centerlines; exits early once a distance
/// below `enough` is found.
inline double min_centerline_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                                      double enough = 0.0) {
    double best = std::numeric_limits<double>::max();
    for (size_t i = 0; i + 1 < a.size(); i++) {
        for (size_t j = 0; j + 1 < b.size(); j++) {
            // cheap sphere reject on the segment pair
            const Vec3 ca = 0.5 * (a[i] + a[i + 1]);
            const Vec3 cb = 0.5 * (b[j] + b[j + 1]);
            const double ra = 0.5 * norm(a[i + 1] - a[i]);
            const double rb = 0.5 * norm(b[j + 1] - b[j]);
            if (norm(ca - cb) - ra - rb >= best) continue;
            best = std::min(best, segment_distance(a[i], a[i + 1], b[j], b[j + 1]));
            if (best < enough) return best;
        }
    }
    return best;
}

inline double linking_sum_safe(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    try {
        return polyline_linking_sum(a, b);
    } catch (const NearSingular&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

// Projected centerline crossing points between two parts.
inline std::vector<Vec2> projected_crossings(const std::vector<Vec3>& wa,
                                             const std::vector<Vec3>& wb, const Intrinsics& k) {
    auto proj = [&](const std::vector<Vec3>& wc) {
        std::vector<Vec2> px;
        px.reserve(wc.size());
        for (const Vec3& p : wc) px.push_back(project(p, k));
        return px;
    };
    const auto pa = proj(wa), pb = proj(wb);
    std::vector<Vec2> hits;
    for (size_t i = 0; i + 1 < pa.size(); i++) {
        for (size_t j = 0; j + 1 < pb.size(); j++) {
            const Vec2 p = pa[i], r = pa[i + 1] - pa[i];
            const Vec2 q = pb[j], s = pb[j + 1] - pb[j];
            const double denom = cross(r, s);
            if (denom == 0.0) continue;
            const double t = cross(q - p, s) / denom;
            const double u = cross(q - p, r) / denom;
            if (t >= 0 && t <= 1 && u >= 0 && u <= 1) hits.push_back(p + t * r);
        }
    }
    return hits;
}

inline RigidTransform yaw(double yaw_rad) {
    return RigidTransform::rotation_axis_angle({0, 0, 1}, yaw_rad);
}

inline RigidTransform random_orientation(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return RigidTransform::from_quaternion(g(rng), g(rng), g(rng), g(rng));
}

// z extents of the posed tube (camera z grows away from the camera)
inline std::pair<double, double> tube_z_range(const WirePart& p) {
    double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
    for (const Vec3& q : p.world_centerline()) {
        lo = std::min(lo, q.z);
        hi = std::max(hi, q.z);
    }
    return {lo - p.wire_radius, hi + p.wire_radius};
}

// translate the part so the deepest tube point touches the floor plane
inline void rest_on_floor(WirePart& p, double floor_mm) {
    p.pose.t.z += floor_mm - tube_z_range(p).second;
}

inline double part_extent(const WirePart& p) {
    double r = 0.0;
    for (const Vec3& q : p.centerline) r = std::max(r, norm(q));
    return r + p.wire_radius;
}

// Pair bookkeeping over the final geometry. Entangling means linked closures,
// or near contact with at least two projected crossings (hooked parts).
inline void fill_pair_truth(SceneTruth& truth, const SceneConfig& cfg) {
    truth.pairs.clear();
    truth.free_part_ids.clear();
    const double wire_r = cfg.part.wire_radius_mm;
    const Intrinsics k = cfg.intrinsics();
    const int n = static_cast<int>(truth.parts.size());
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            PairTruth pt;
            pt.i = i;
            pt.j = j;
            const auto wa = truth.parts[i].world_centerline();
            const auto wb = truth.parts[j].world_centerline();
            pt.min_distance_mm = min_centerline_distance(wa, wb);
            const double lk = linking_sum_safe(wa, wb);
            pt.gli_sum = std::isnan(lk) ? 0.0 : lk;
            pt.linking = std::isnan(lk) ? 0 : static_cast<int>(std::lround(pt.gli_sum));
            pt.crossings_px = projected_crossings(wa, wb, k);
            pt.crossing_count = static_cast<int>(pt.crossings_px.size());
            pt.entangling = pt.linking != 0 ||
                            (pt.min_distance_mm < 3.0 * wire_r && pt.crossing_count >= 2);
            truth.pairs.push_back(std::move(pt));
        }
    }
    for (int i = 0; i < n; i++) {
        bool free = true;
        for (const auto& pt : truth.pairs)
            if ((pt.i == i || pt.j == i) && pt.entangling) free = false;
        if (free) truth.free_part_ids.push_back(i);
    }
}

} // namespace detail

/// Arrange parts into one of the canonical placements; retries seeded pose
/// draws until the placement's geometric contract holds.
inline SceneTruth compose_scene(std::vector<WirePart> parts, Placement placement, uint64_t seed,
                                const SceneConfig& cfg = {}) {
    if (parts.empty()) throw InvalidParams("compose_scene needs at least one part");
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const double floor = cfg.floor_depth_mm;
    const double span = cfg.view_width_mm;
    const double wire_r = cfg.part.wire_radius_mm;

    SceneTruth truth;
    truth.seed = seed;

    auto world = [](const WirePart& p) { return p.world_centerline(); };

    bool done = false;
    for (int attempt = 0; attempt < cfg.max_attempts && !done; attempt++) {
        bool ok = true;
        switch (placement) {
        case Placement::separated: {
            truth.pattern = "separated";
            const double margin = 2.0 * wire_r + 20.0;
            double x = -span * 0.25;
            for (auto& p : parts) {
                const double ext = detail::part_extent(p);
                x += ext;
                p.pose = detail::yaw(uni(rng) * 2 * kPi);
                p.pose.t = {x, (uni(rng) - 0.5) * span * 0.2, 0.0};
                detail::rest_on_floor(p, floor);
                x += ext + margin;
            }
            for (size_t i = 0; i + 1 < parts.size() && ok; i++)
                for (size_t j = i + 1; j < parts.size() && ok; j++)
                    if (detail::min_centerline_distance(world(parts[i]), world(parts[j])) <=
                        2.0 * wire_r + margin * 0.5)
                        ok = false;
            break;
        }
        case Placement::overlapped: {
            truth.pattern = "overlapped";
            if (parts.size() != 2) throw InvalidParams("overlapped placement needs 2 parts");
            // both flat; the second rests above the first with a separating
            // plane between the tubes, so the closures cannot link
            parts[0].pose = detail::yaw(uni(rng) * 2 * kPi);
            parts[0].pose.t = {0, 0, 0};
            detail::rest_on_floor(parts[0], floor);
            const double z0_top = detail::tube_z_range(parts[0]).first;
            parts[1].pose = detail::yaw(uni(rng) * 2 * kPi);
            parts[1].pose.t = {(uni(rng) - 0.5) * cfg.part.c_radius_mm,
                               (uni(rng) - 0.5) * cfg.part.c_radius_mm, 0.0};
            detail::rest_on_floor(parts[1], floor);
            const double z1_bottom = detail::tube_z_range(parts[1]).second;
            parts[1].pose.t.z -= (z1_bottom - z0_top) + 1.0;

            if (detail::min_centerline_distance(world(parts[0]), world(parts[1]),
                                                2.0 * wire_r) <= 2.0 * wire_r)
                ok = false;
            else if (detail::projected_crossings(world(parts[0]), world(parts[1]),
                                                 cfg.intrinsics())
                         .empty())
                ok = false; // must actually overlap in the image
            break;
        }
        case Placement::twisted: {
            truth.pattern = "twisted";
            if (parts.size() != 2) throw InvalidParams("twisted placement needs 2 parts");
            // chain-link arrangement: ring B tilted out of plane about an
            // in-plane axis and displaced along that axis, so B pierces the
            // first ring's disk near the origin
            parts[0].pose = RigidTransform{};
            const double swing = uni(rng) * 2 * kPi;
            const Vec3 axis{std::cos(swing), std::sin(swing), 0.0};
            const double tilt = deg_to_rad(50.0 + uni(rng) * 35.0);
            parts[1].pose = RigidTransform::rotation_axis_angle(axis, tilt);
            const double reach = (0.9 + 0.2 * uni(rng)) * cfg.part.c_radius_mm;
            parts[1].pose.t = reach * axis;

            const RigidTransform spin = detail::yaw(uni(rng) * 2 * kPi);
            for (auto& p : parts) p.pose = p.pose.then(spin);
            double z_deep = std::numeric_limits<double>::lowest();
            for (auto& p : parts) z_deep = std::max(z_deep, detail::tube_z_range(p).second);
            for (auto& p : parts) p.pose.t.z += floor - z_deep;

            if (detail::min_centerline_distance(world(parts[0]), world(parts[1]),
                                                2.0 * wire_r) <= 2.0 * wire_r) {
                ok = false;
                break;
            }
            const double lk = detail::linking_sum_safe(world(parts[0]), world(parts[1]));
            if (!(std::fabs(std::fabs(lk) - 1.0) < 0.05)) ok = false;
            break;
        }
        case Placement::random_pile: {
            truth.pattern = "pile";
            const double area = span * 0.28;
            for (size_t i = 0; i < parts.size() && ok; i++) {
                bool part_ok = false;
                for (int t = 0; t < cfg.max_attempts && !part_ok; t++) {
                    parts[i].pose = detail::random_orientation(rng);
                    parts[i].pose.t = {(uni(rng) - 0.5) * area, (uni(rng) - 0.5) * area, 0.0};
                    detail::rest_on_floor(parts[i], floor);
                    part_ok = true;
                    for (int lift = 0; lift < 120; lift++) {
                        bool clear = true;
                        for (size_t j = 0; j < i; j++)
                            if (detail::min_centerline_distance(world(parts[i]), world(parts[j]),
                                                                2.2 * wire_r) <= 2.2 * wire_r) {
                                clear = false;
                                break;
                            }
                        if (clear) break;
                        parts[i].pose.t.z -= 4.0;
                        if (detail::tube_z_range(parts[i]).first < floor - 400.0) {
                            part_ok = false;
                            break;
                        }
                    }
                }
                if (!part_ok) ok = false;
            }
            break;
        }
        }
        if (ok) {
            truth.parts = parts;
            done = true;
        }
    }
    if (!done) throw PlacementFailed("could not realize placement after max attempts");

    detail::fill_pair_truth(truth, cfg);
    return truth;
}

struct RenderResult {
    DepthImage image;
    MaskGrid labels; // 0 = background/floor, part i owns value i+1
    std::vector<std::vector<Vec2>> silhouettes; // per part, projected tube outline
};

namespace detail {

// Nearest intersection of the pixel ray (origin 0, direction d) with the
// capsule (a, b, radius). Returns camera depth (z of the hit) or nullopt.
inline std::optional<double> ray_capsule_depth(Vec3 d, Vec3 a, Vec3 b, double radius) {
    const Vec3 u = b - a;
    const double uu = dot(u, u);
    double best = std::numeric_limits<double>::max();

    if (uu > 0.0) {
        const Vec3 w = -1.0 * a;
        const Vec3 d_perp = d - (dot(d, u) / uu) * u;
        const Vec3 w_perp = w - (dot(w, u) / uu) * u;
        const double A = dot(d_perp, d_perp);
        const double B = 2.0 * dot(d_perp, w_perp);
        const double C = dot(w_perp, w_perp) - radius * radius;
        if (A > 0.0) {
            const double disc = B * B - 4 * A * C;
            if (disc >= 0.0) {
                const double t = (-B - std::sqrt(disc)) / (2 * A);
                if (t > 0.0) {
                    const double s = dot(t * d - a, u) / uu;
                    if (s >= 0.0 && s <= 1.0) best = std::min(best, t);
                }
            }
        }
    }
    for (const Vec3& c : {a, b}) {
        const double A = dot(d, d);
        const double B = -2.0 * dot(d, c);
        const double C = dot(c, c) - radius * radius;
        const double disc = B * B - 4 * A * C;
        if (disc < 0.0) continue;
        const double t = (-B - std::sqrt(disc)) / (2 * A);
        if (t > 0.0) best = std::min(best, t);
    }
    if (best == std::numeric_limits<double>::max()) return std::nullopt;
    return best * d.z;
}

} // namespace detail

/// Z-buffer render of the wire tubes over a flat floor, with optional
/// Gaussian depth noise and border invalidation. Labels record the nearest
/// part per pixel; silhouettes are the analytic projected tube outlines.
inline RenderResult render_depth(const SceneTruth& scene, const SceneConfig& cfg,
                                 uint64_t noise_seed = 0) {
    const Intrinsics k = cfg.intrinsics();
    const int w = cfg.image_width, h = cfg.image_height;

    RenderResult out;
    out.image = DepthImage(w, h, k);
    out.labels = MaskGrid(w, h, 0);

    Grid<float> zbuf(w, h, static_cast<float>(cfg.floor_depth_mm));

    for (size_t pi = 0; pi < scene.parts.size(); pi++) {
        const WirePart& part = scene.parts[pi];
        const auto wc = part.world_centerline();
        for (size_t s = 0; s + 1 < wc.size(); s++) {
            const Vec3 a = wc[s], b = wc[s + 1];
            if (a.z <= part.wire_radius || b.z <= part.wire_radius) continue;
            Vec2 pa, pb;
            try {
                pa = project(a, k);
                pb = project(b, k);
            } catch (const NonPositiveDepth&) {
                continue;
            }
            const double zmin = std::min(a.z, b.z) - part.wire_radius;
            const double pad_x = part.wire_radius * k.fx / zmin + 2.0;
            const double pad_y = part.wire_radius * k.fy / zmin + 2.0;
            const int x0 = std::max(0, static_cast<int>(std::floor(std::min(pa.x, pb.x) - pad_x)));
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(pa.x, pb.x) + pad_x)));
            const int y0 = std::max(0, static_cast<int>(std::floor(std::min(pa.y, pb.y) - pad_y)));
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(pa.y, pb.y) + pad_y)));
            for (int y = y0; y <= y1; y++) {
                for (int x = x0; x <= x1; x++) {
                    const Vec3 dir{(x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0};
                    const auto depth = detail::ray_capsule_depth(dir, a, b, part.wire_radius);
                    if (depth && *depth < zbuf.at(x, y)) {
                        zbuf.at(x, y) = static_cast<float>(*depth);
                        out.labels.at(x, y) = static_cast<uint8_t>(pi + 1);
                    }
                }
            }
        }

        // analytic silhouette: centerline projection offset by the projected
        // tube radius on both sides
        std::vector<Vec2> left, right;
        for (size_t s = 0; s < wc.size(); s++) {
            const Vec3 p = wc[s];
            if (p.z <= 0) continue;
            const Vec2 c = project(p, k);
            const size_t nb = s + 1 < wc.size() ? s + 1 : s - 1;
            Vec2 tdir = project(wc[nb], k) - c;
            if (s + 1 >= wc.size()) tdir = -1.0 * tdir;
            const double len = norm(tdir);
            if (len == 0.0) continue;
            const Vec2 n{-tdir.y / len, tdir.x / len};
            const double rad_px = part.wire_radius * k.fx / p.z;
            left.push_back(c + rad_px * n);
            right.push_back(c + (-rad_px) * n);
        }
        std::vector<Vec2> outline = left;
        outline.insert(outline.end(), right.rbegin(), right.rend());
        out.silhouettes.push_back(std::move(outline));
    }

    std::mt19937_64 rng(noise_seed ^ 0xd1b54a32d192ed03ull);
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma_mm);
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++) {
            double d = zbuf.at(x, y);
            if (cfg.noise_sigma_mm > 0.0) d += noise(rng);
            out.image.set(x, y, static_cast<float>(d));
        }
    for (int b = 0; b < cfg.border_invalid_px; b++) {
        for (int x = 0; x < w; x++) {
            out.image.invalidate(x, b);
            out.image.invalidate(x, h - 1 - b);
        }
        for (int y = 0; y < h; y++) {
            out.image.invalidate(b, y);
            out.image.invalidate(w - 1 - b, y);
        }
    }
    return out;
}

/// Derive pixel-space truth from the rendered labels: tangled / free region
/// rectangles (bounding boxes of label ownership, padded and clipped).
inline void annotate_truth(SceneTruth& truth, const RenderResult& render) {
    const int w = render.labels.width(), h = render.labels.height();

    struct Box {
        int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
        bool any() const { return x1 >= 0; }
    };
    std::vector<Box> boxes(truth.parts.size());
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++) {
            const int id = render.labels.at(x, y);
            if (id == 0) continue;
            Box& b = boxes[id - 1];
            b.x0 = std::min(b.x0, x);
            b.y0 = std::min(b.y0, y);
            b.x1 = std::max(b.x1, x);
            b.y1 = std::max(b.y1, y);
        }

    auto merge = [](Box a, const Box& b) {
        if (!b.any()) return a;
        if (!a.any()) return b;
        a.x0 = std::min(a.x0, b.x0);
        a.y0 = std::min(a.y0, b.y0);
        a.x1 = std::max(a.x1, b.x1);
        a.y1 = std::max(a.y1, b.y1);
        return a;
    };

    Box tangled, free_box;
    for (const auto& pair : truth.pairs)
        if (pair.entangling) {
            tangled = merge(tangled, boxes[pair.i]);
            tangled = merge(tangled, boxes[pair.j]);
        }
    for (int id : truth.free_part_ids) free_box = merge(free_box, boxes[id]);

    auto pad_clip = [&](const Box& b) {
        const int pad = 10;
        const int x0 = std::max(0, b.x0 - pad), y0 = std::max(0, b.y0 - pad);
        const int x1 = std::min(w - 1, b.x1 + pad), y1 = std::min(h - 1, b.y1 + pad);
        return Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
    };
    truth.tangled_region.reset();
    truth.free_region.reset();
    if (tangled.any()) truth.tangled_region = pad_clip(tangled);
    if (free_box.any()) truth.free_region = pad_clip(free_box);
}

/// Twisted pair on one side, a single free part well away on the other; the
/// canonical scene for map-discrimination and planning tests.
inline SceneTruth make_two_region_scene(const SceneConfig& cfg, uint64_t seed,
                                        PartShape pair_shape = PartShape::C,
                                        PartShape free_shape = PartShape::C) {
    std::mt19937_64 rng(seed ^ 0xa0761d6478bd642full);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    for (int attempt = 0; attempt < cfg.max_attempts; attempt++) {
        const uint64_t sub = seed * 1315423911ull + attempt;
        SceneTruth pair_scene;
        try {
            pair_scene = compose_scene(
                {make_part(pair_shape, cfg.part), make_part(pair_shape, cfg.part)},
                Placement::twisted, sub, cfg);
        } catch (const PlacementFailed&) {
            continue;
        }

        const double side = uni(rng) * 2 * kPi;
        const double offset = cfg.view_width_mm * 0.22;
        const Vec3 pair_at{offset * std::cos(side), offset * std::sin(side), 0.0};

        SceneTruth scene;
        scene.seed = seed;
        scene.pattern = "two_region";
        scene.parts = pair_scene.parts;
        for (auto& p : scene.parts) p.pose.t += pair_at;

        WirePart free_part = make_part(free_shape, cfg.part);
        free_part.pose = detail::yaw(uni(rng) * 2 * kPi);
        free_part.pose.t = -1.0 * pair_at;
        detail::rest_on_floor(free_part, cfg.floor_depth_mm);
        scene.parts.push_back(free_part);

        // everything inside the camera view, clear of the borders
        const Intrinsics k = cfg.intrinsics();
        bool inside = true;
        for (const auto& p : scene.parts)
            for (const Vec3& q : p.world_centerline()) {
                const Vec2 px = project(q, k);
                const double m = p.wire_radius * k.fx / q.z + cfg.border_invalid_px + 4;
                if (px.x < m || px.x > cfg.image_width - 1 - m || px.y < m ||
                    px.y > cfg.image_height - 1 - m)
                    inside = false;
            }
        if (!inside) continue;

        // the free part must stay clear of the pair
        bool clear = true;
        for (int i = 0; i < 2; i++)
            if (detail::min_centerline_distance(scene.parts[i].world_centerline(),
                                                scene.parts[2].world_centerline(),
                                                6.0 * cfg.part.wire_radius_mm) <
                6.0 * cfg.part.wire_radius_mm)
                clear = false;
        if (!clear) continue;

        // projected tube boxes, padded like the truth regions, must not touch
        auto outline_box = [&](const WirePart& p) {
            double x0 = 1e9, y0 = 1e9, x1 = -1e9, y1 = -1e9;
            for (const Vec3& q : p.world_centerline()) {
                const Vec2 px = project(q, k);
                const double rad = p.wire_radius * k.fx / q.z;
                x0 = std::min(x0, px.x - rad);
                y0 = std::min(y0, px.y - rad);
                x1 = std::max(x1, px.x + rad);
                y1 = std::max(y1, px.y + rad);
            }
            const int pad = 11;
            return Rect{static_cast<int>(x0) - pad, static_cast<int>(y0) - pad,
                        static_cast<int>(x1 - x0) + 2 * pad + 1,
                        static_cast<int>(y1 - y0) + 2 * pad + 1};
        };
        const Rect pair_box_a = outline_box(scene.parts[0]);
        const Rect pair_box_b = outline_box(scene.parts[1]);
        const Rect free_box = outline_box(scene.parts[2]);
        if (pair_box_a.intersection_area(free_box) > 0 ||
            pair_box_b.intersection_area(free_box) > 0)
            continue;

        detail::fill_pair_truth(scene, cfg);
        if (scene.free_part_ids != std::vector<int>{2}) continue;
        bool pair_linked = false;
        for (const auto& pt : scene.pairs)
            if (pt.i == 0 && pt.j == 1 && pt.linking != 0) pair_linked = true;
        if (!pair_linked) continue;
        return scene;
    }
    throw PlacementFailed("could not build a two-region scene for this seed");
}

/// Seeded pile of C, S, or mixed parts.
inline SceneTruth make_pile_scene(const SceneConfig& cfg, uint64_t seed,
                                  const std::string& mix = "mixed") {
    std::mt19937_64 rng(seed ^ 0xe7037ed1a0b428dbull);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<WirePart> parts;
    for (int i = 0; i < cfg.pile_count; i++) {
        PartShape s = PartShape::C;
        if (mix == "s_only") s = PartShape::S;
        else if (mix == "mixed") s = uni(rng) < 0.5 ? PartShape::C : PartShape::S;
        parts.push_back(make_part(s, cfg.part));
    }
    SceneTruth t = compose_scene(std::move(parts), Placement::random_pile, seed, cfg);
    t.pattern = mix == "mixed" ? "mixed" : (mix == "s_only" ? "s_only" : "c_only");
    return t;
}

} // namespace tanglemap
