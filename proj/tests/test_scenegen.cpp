#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tanglemap/scenegen.hpp"

using namespace tanglemap;

namespace {

SceneConfig small_scene() {
    SceneConfig cfg;
    cfg.image_width = cfg.image_height = 256;
    return cfg;
}

// independent linking oracle: pairwise quadrature over the closure-completed
// loops (slow, test-only)
double linking_by_quadrature(const std::vector<Vec3>& la, const std::vector<Vec3>& lb, int n) {
    double sum = 0.0;
    for (size_t i = 0; i < la.size(); i++) {
        const Vec3 a0 = la[i], a1 = la[(i + 1) % la.size()];
        if (norm(a1 - a0) == 0.0) continue;
        for (size_t j = 0; j < lb.size(); j++) {
            const Vec3 b0 = lb[j], b1 = lb[(j + 1) % lb.size()];
            if (norm(b1 - b0) == 0.0) continue;
            sum += gli_quadrature_points(a0, a1, b0, b1, n);
        }
    }
    return sum;
}

double polyline_length(const std::vector<Vec3>& pts) {
    double len = 0.0;
    for (size_t i = 1; i < pts.size(); i++) len += norm(pts[i] - pts[i - 1]);
    return len;
}

} // namespace

TEST_CASE("a full-circle C part closes on itself") {
    PartParams p;
    p.c_arc_deg = 360.0;
    const WirePart part = make_part(PartShape::C, p);
    REQUIRE(norm(part.centerline.front() - part.centerline.back()) < 1e-9);
}

TEST_CASE("an S part with no second lobe equals the matching C part") {
    PartParams ps;
    ps.s_arc2_deg = 0.0;
    PartParams pc = ps;
    pc.c_radius_mm = ps.s_radius_mm;
    pc.c_arc_deg = ps.s_arc1_deg;
    const WirePart s = make_part(PartShape::S, ps);
    const WirePart c = make_part(PartShape::C, pc);
    REQUIRE(s.centerline.size() == c.centerline.size());
    for (size_t i = 0; i < s.centerline.size(); i++)
        REQUIRE(norm(s.centerline[i] - c.centerline[i]) < 1e-9);
}

TEST_CASE("centerline length matches the analytic arc length") {
    PartParams p;
    const WirePart c = make_part(PartShape::C, p);
    const double expected_c = p.c_radius_mm * deg_to_rad(p.c_arc_deg);
    REQUIRE(std::fabs(polyline_length(c.centerline) - expected_c) / expected_c < 1e-3);

    const WirePart s = make_part(PartShape::S, p);
    const double expected_s = p.s_radius_mm * (deg_to_rad(p.s_arc1_deg) + deg_to_rad(p.s_arc2_deg));
    REQUIRE(std::fabs(polyline_length(s.centerline) - expected_s) / expected_s < 1e-3);
}

TEST_CASE("invalid part parameters are rejected") {
    PartParams p;
    p.wire_radius_mm = 0.0;
    REQUIRE_THROWS_AS(make_part(PartShape::C, p), InvalidParams);
    PartParams q;
    q.centerline_points = 4;
    REQUIRE_THROWS_AS(make_part(PartShape::C, q), InvalidParams);
}

TEST_CASE("separated parts keep their clearance") {
    const SceneConfig cfg = small_scene();
    const SceneTruth t = compose_scene(
        {make_part(PartShape::C, cfg.part), make_part(PartShape::C, cfg.part)},
        Placement::separated, 5, cfg);
    REQUIRE(t.pairs.size() == 1);
    REQUIRE(t.pairs[0].min_distance_mm > 2.0 * cfg.part.wire_radius_mm + 10.0);
    REQUIRE(t.pairs[0].linking == 0);
    REQUIRE_FALSE(t.pairs[0].entangling);
    REQUIRE(t.free_part_ids == std::vector<int>{0, 1});
}

TEST_CASE("twisted pairs are linked, overlapped pairs are not") {
    const SceneConfig cfg = small_scene();
    for (uint64_t seed : {1u, 2u, 3u}) {
        const SceneTruth twisted = compose_scene(
            {make_part(PartShape::C, cfg.part), make_part(PartShape::C, cfg.part)},
            Placement::twisted, seed, cfg);
        REQUIRE(std::abs(twisted.pairs[0].linking) == 1);
        REQUIRE(twisted.pairs[0].entangling);
        REQUIRE(twisted.free_part_ids.empty());

        const SceneTruth overlapped = compose_scene(
            {make_part(PartShape::C, cfg.part), make_part(PartShape::C, cfg.part)},
            Placement::overlapped, seed, cfg);
        REQUIRE(overlapped.pairs[0].linking == 0);
        REQUIRE(overlapped.pairs[0].crossing_count >= 1);
    }
}

TEST_CASE("construction linking labels agree with the quadrature oracle") {
    const SceneConfig cfg = small_scene();
    for (uint64_t seed : {10u, 11u}) {
        const SceneTruth twisted = compose_scene(
            {make_part(PartShape::C, cfg.part), make_part(PartShape::C, cfg.part)},
            Placement::twisted, seed, cfg);
        const double lk = linking_by_quadrature(twisted.parts[0].world_centerline(),
                                                twisted.parts[1].world_centerline(), 24);
        REQUIRE(std::lround(lk) == twisted.pairs[0].linking);

        const SceneTruth overlapped = compose_scene(
            {make_part(PartShape::C, cfg.part), make_part(PartShape::C, cfg.part)},
            Placement::overlapped, seed, cfg);
        const double lk0 = linking_by_quadrature(overlapped.parts[0].world_centerline(),
                                                 overlapped.parts[1].world_centerline(), 24);
        REQUIRE(std::lround(lk0) == 0);
    }
}

TEST_CASE("an empty scene renders a constant valid floor") {
    SceneConfig cfg = small_scene();
    cfg.noise_sigma_mm = 0.0;
    cfg.border_invalid_px = 0;
    SceneTruth truth;
    truth.pattern = "empty";
    const RenderResult r = render_depth(truth, cfg, 0);
    REQUIRE(r.image.valid_count() == cfg.image_width * cfg.image_height);
    for (int y = 0; y < cfg.image_height; y += 17)
        for (int x = 0; x < cfg.image_width; x += 17)
            REQUIRE(r.image.at(x, y) == Catch::Approx(cfg.floor_depth_mm));
}

TEST_CASE("rendered part depth matches the analytic tube top") {
    SceneConfig cfg = small_scene();
    cfg.noise_sigma_mm = 0.0;
    const SceneTruth t =
        compose_scene({make_part(PartShape::C, cfg.part)}, Placement::separated, 3, cfg);
    const RenderResult r = render_depth(t, cfg, 3);

    // analytic top: nearest centerline point minus the tube radius
    double top = std::numeric_limits<double>::max();
    for (const Vec3& p : t.parts[0].world_centerline()) top = std::min(top, p.z);
    top -= t.parts[0].wire_radius;

    double rendered = std::numeric_limits<double>::max();
    int mask_px = 0;
    for (int y = 0; y < cfg.image_height; y++)
        for (int x = 0; x < cfg.image_width; x++)
            if (r.labels.at(x, y) == 1 && r.image.is_valid(x, y)) {
                rendered = std::min(rendered, static_cast<double>(r.image.at(x, y)));
                mask_px++;
            }
    REQUIRE(mask_px > 100);
    REQUIRE(std::fabs(rendered - top) < 1.0);
    REQUIRE(rendered < cfg.floor_depth_mm);
}

TEST_CASE("part pixels are strictly nearer than the floor") {
    SceneConfig cfg = small_scene();
    cfg.noise_sigma_mm = 0.0;
    const SceneTruth t = compose_scene(
        {make_part(PartShape::C, cfg.part), make_part(PartShape::S, cfg.part)},
        Placement::separated, 9, cfg);
    const RenderResult r = render_depth(t, cfg, 9);
    for (int y = 0; y < cfg.image_height; y++)
        for (int x = 0; x < cfg.image_width; x++)
            if (r.labels.at(x, y) != 0 && r.image.is_valid(x, y))
                REQUIRE(r.image.at(x, y) < cfg.floor_depth_mm);
}

TEST_CASE("rendering is deterministic for a fixed seed") {
    const SceneConfig cfg = small_scene();
    const SceneTruth t = compose_scene(
        {make_part(PartShape::C, cfg.part), make_part(PartShape::C, cfg.part)},
        Placement::twisted, 21, cfg);
    const RenderResult a = render_depth(t, cfg, 21);
    const RenderResult b = render_depth(t, cfg, 21);
    REQUIRE(a.image.depth.data() == b.image.depth.data());
    REQUIRE(a.image.valid.data() == b.image.valid.data());
    REQUIRE(a.labels == b.labels);
}

TEST_CASE("two-region scenes have one free part and disjoint regions") {
    const SceneConfig cfg = small_scene();
    int built = 0;
    for (uint64_t seed = 100; seed < 110; seed++) {
        SceneTruth t;
        try {
            t = make_two_region_scene(cfg, seed);
        } catch (const PlacementFailed&) {
            continue;
        }
        built++;
        REQUIRE(t.parts.size() == 3);
        REQUIRE(t.free_part_ids == std::vector<int>{2});

        RenderResult r = render_depth(t, cfg, seed);
        annotate_truth(t, r);
        REQUIRE(t.tangled_region.has_value());
        REQUIRE(t.free_region.has_value());
        REQUIRE(t.tangled_region->intersection_area(*t.free_region) == 0);
    }
    REQUIRE(built >= 8);
}

TEST_CASE("pile scenes place every part without interpenetration") {
    SceneConfig cfg = small_scene();
    cfg.pile_count = 4;
    const SceneTruth t = make_pile_scene(cfg, 77, "mixed");
    REQUIRE(t.parts.size() == 4);
    for (const auto& pair : t.pairs)
        REQUIRE(pair.min_distance_mm > 2.0 * cfg.part.wire_radius_mm);
}

TEST_CASE("placement failure surfaces as an error") {
    SceneConfig cfg = small_scene();
    cfg.max_attempts = 8;
    // near-straight sticks cannot link, so the twisted contract never holds
    PartParams stick = cfg.part;
    stick.c_arc_deg = 30.0;
    REQUIRE_THROWS_AS(compose_scene({make_part(PartShape::C, stick), make_part(PartShape::C, stick)},
                                    Placement::twisted, 1, cfg),
                      PlacementFailed);
}
