#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "tanglemap/entanglement_map.hpp"
#include "tanglemap/graspability.hpp"

namespace tanglemap {

struct PlannerConfig {
    EdgeConfig edge;
    MapConfig map;
    GraspConfig grasp;

    double writhe_gate = 0.05;       // tangle-aware planning above this scene writhe
    double region_window_frac = 0.25;
    int regions_k = 3;
    int top_k_per_region = 5;
    double rank_alpha = 0.7;         // entanglement weight in the final score

    void check() const {
        if (regions_k < 1) throw InvalidParams("regions_k must be >= 1");
        if (rank_alpha < 0.0 || rank_alpha > 1.0) throw InvalidParams("alpha must be in [0,1]");
    }
};

enum class GateTaken { direct, tangle_aware };

inline const char* to_string(GateTaken g) {
    return g == GateTaken::direct ? "direct" : "tangle_aware";
}

struct PlanResult {
    GateTaken gate_taken = GateTaken::direct;
    TopologyCoordinate coordinate;
    std::optional<EntanglementMap> map;
    std::vector<GraspCandidate> candidates; // sorted by score, best first

    // intermediates kept for visualization
    EdgeSegmentSet segments;
    WritheMatrix matrix;
};

/// Raised when no collision-free pose exists anywhere the planner looked.
/// The partial result (coordinate, map) is preserved for reporting.
struct NoGraspFound : Error {
    explicit NoGraspFound(PlanResult r)
        : Error("no collision-free grasp candidate found"), partial(std::move(r)) {}
    PlanResult partial;
};

/// The k sliding windows with the smallest mean map value. A selected window
/// suppresses windows overlapping it by more than half; ties resolve in
/// row-major grid order.
inline std::vector<Rect> select_regions(const EntanglementMap& map, Vec2i window_px, int k) {
    if (window_px.x <= 0 || window_px.y <= 0 || window_px.x > map.width() ||
        window_px.y > map.height())
        throw WindowLargerThanImage("region window exceeds map size");

    const std::vector<int> xs = detail::window_origins(map.width(), window_px.x,
                                                       std::max(1, window_px.x / 2));
    const std::vector<int> ys = detail::window_origins(map.height(), window_px.y,
                                                       std::max(1, window_px.y / 2));

    // summed-area table for O(1) window means
    Grid<double> sat(map.width() + 1, map.height() + 1, 0.0);
    for (int y = 0; y < map.height(); y++)
        for (int x = 0; x < map.width(); x++)
            sat.at(x + 1, y + 1) =
                map.at(x, y) + sat.at(x, y + 1) + sat.at(x + 1, y) - sat.at(x, y);

    struct Scored {
        double mean;
        int order;
        Rect rect;
    };
    std::vector<Scored> windows;
    int order = 0;
    for (int y0 : ys)
        for (int x0 : xs) {
            const double sum = sat.at(x0 + window_px.x, y0 + window_px.y) -
                               sat.at(x0, y0 + window_px.y) - sat.at(x0 + window_px.x, y0) +
                               sat.at(x0, y0);
            windows.push_back({sum / (static_cast<double>(window_px.x) * window_px.y), order++,
                               Rect{x0, y0, window_px.x, window_px.y}});
        }
    std::stable_sort(windows.begin(), windows.end(), [](const Scored& a, const Scored& b) {
        if (a.mean != b.mean) return a.mean < b.mean;
        return a.order < b.order;
    });

    std::vector<Rect> picked;
    for (const auto& wdw : windows) {
        if (static_cast<int>(picked.size()) >= k) break;
        bool overlaps = false;
        for (const Rect& p : picked)
            if (wdw.rect.intersection_area(p) * 2 > wdw.rect.area()) {
                overlaps = true;
                break;
            }
        if (!overlaps) picked.push_back(wdw.rect);
    }
    return picked;
}

/// Final score: alpha * (1 - entanglement) + (1 - alpha) * graspability.
/// Expects graspability already normalized over the candidate set. Ties break
/// toward lower entanglement, then smaller row, then smaller column.
inline std::vector<GraspCandidate> rank(std::vector<GraspCandidate> cands, double alpha) {
    for (auto& c : cands)
        c.score = alpha * (1.0 - c.entanglement) + (1.0 - alpha) * c.graspability;
    std::stable_sort(cands.begin(), cands.end(), [](const GraspCandidate& a, const GraspCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.entanglement != b.entanglement) return a.entanglement < b.entanglement;
        if (a.pos.y != b.pos.y) return a.pos.y < b.pos.y;
        return a.pos.x < b.pos.x;
    });
    return cands;
}

/// Min-max normalize graspability over the set; a contrast-free set maps to 1.
inline void normalize_graspability(std::vector<GraspCandidate>& cands) {
    if (cands.empty()) return;
    double lo = cands[0].graspability, hi = cands[0].graspability;
    for (const auto& c : cands) {
        lo = std::min(lo, c.graspability);
        hi = std::max(hi, c.graspability);
    }
    for (auto& c : cands) c.graspability = hi > lo ? (c.graspability - lo) / (hi - lo) : 1.0;
}

/// Full pipeline: topology coordinate, writhe gate, and either direct
/// whole-image grasp detection or tangle-aware region planning. rank_alpha 0
/// means entanglement is ignored entirely, which also takes the direct path.
inline PlanResult plan(const DepthImage& img, const PlannerConfig& cfg = {}) {
    cfg.check();
    PlanResult r;
    r.segments = extract_segments(img, cfg.edge);

    if (r.segments.size() >= 2) {
        r.matrix = writhe_matrix(r.segments.segments, cfg.map.eps_intersect_mm);
        r.coordinate.writhe = writhe(r.matrix);
        r.coordinate.density = density(r.matrix);
        if (r.matrix.sum() > 0.0) r.coordinate.center = center(r.matrix);
    }

    const std::vector<HandTemplate> templates = build_templates(cfg.grasp.hand, cfg.grasp.rotations);
    const double nms = cfg.grasp.nms_radius_px > 0.0 ? cfg.grasp.nms_radius_px
                                                     : cfg.grasp.hand.finger_width_px;
    const GraspMaps maps = multi_slice_graspability(img, templates, cfg.grasp);

    const bool tangle_aware = r.coordinate.writhe > cfg.writhe_gate && cfg.rank_alpha > 0.0;

    std::vector<GraspCandidate> cands;
    if (!tangle_aware) {
        r.gate_taken = GateTaken::direct;
        const Rect whole{0, 0, img.width(), img.height()};
        cands = extract_candidates(maps, img, templates, whole, cfg.regions_k * cfg.top_k_per_region,
                                   nms);
        normalize_graspability(cands);
        cands = rank(std::move(cands), 0.0); // graspability only
    } else {
        r.gate_taken = GateTaken::tangle_aware;
        CenterMask mask(img.width(), img.height(), 0);
        if (r.coordinate.center)
            mask = center_mask(r.segments.segments, *r.coordinate.center, img.width(), img.height(),
                               cfg.map.center_dilation_px);
        const Vec2i window{std::max(1, static_cast<int>(img.width() * cfg.map.window_frac)),
                           std::max(1, static_cast<int>(img.height() * cfg.map.window_frac))};
        const Vec2i stride{std::max(1, static_cast<int>(window.x * cfg.map.stride_frac)),
                           std::max(1, static_cast<int>(window.y * cfg.map.stride_frac))};
        WindowGrid grid = sliding_topology(r.segments, window, stride, cfg.map.eps_intersect_mm);
        const MapWeights weights = adapt_weights(cfg.map.initial_weights, grid,
                                                 r.coordinate.density, cfg.map.sigma_d_max);
        r.map = compose_map(grid, mask, weights);

        const Vec2i region_window{
            std::max(1, static_cast<int>(img.width() * cfg.region_window_frac)),
            std::max(1, static_cast<int>(img.height() * cfg.region_window_frac))};
        for (const Rect& region : select_regions(*r.map, region_window, cfg.regions_k)) {
            auto regional = extract_candidates(maps, img, templates, region,
                                               cfg.top_k_per_region, nms);
            cands.insert(cands.end(), regional.begin(), regional.end());
        }
        // overlapping region borders can report one pose twice
        std::sort(cands.begin(), cands.end(), [](const GraspCandidate& a, const GraspCandidate& b) {
            if (a.pos.y != b.pos.y) return a.pos.y < b.pos.y;
            if (a.pos.x != b.pos.x) return a.pos.x < b.pos.x;
            return a.rotation_index < b.rotation_index;
        });
        cands.erase(std::unique(cands.begin(), cands.end(),
                                [](const GraspCandidate& a, const GraspCandidate& b) {
                                    return a.pos == b.pos && a.rotation_index == b.rotation_index;
                                }),
                    cands.end());
        for (auto& c : cands) c.entanglement = r.map->at(c.pos.x, c.pos.y);
        normalize_graspability(cands);
        cands = rank(std::move(cands), cfg.rank_alpha);
    }

    r.candidates = std::move(cands);
    if (r.candidates.empty()) throw NoGraspFound(std::move(r));
    return r;
}

} // namespace tanglemap
