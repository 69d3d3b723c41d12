#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "tanglemap/camera.hpp"
#include "tanglemap/depth_image.hpp"
#include "tanglemap/errors.hpp"
#include "tanglemap/grid.hpp"
#include "tanglemap/segment.hpp"

namespace tanglemap {

struct EdgeConfig {
    double grad_threshold_mm_px = 8.0;  // hysteresis high threshold
    double hysteresis_low_ratio = 0.4;
    int min_segment_len_px = 8;
    double fit_tolerance_px = 2.0;
    double merge_angle_deg = 5.0;
    int max_segment_len_px = 40;
    int max_segments = 400;
    double min_segment_len_mm = kMinSegmentLenMm;
    double max_range_mm = kDefaultMaxRangeMm;
};

namespace detail {

// Central-difference depth gradient. Pixels whose stencil touches an invalid
// sample get zero magnitude so sensor dropouts never masquerade as edges.
inline void depth_gradient(const DepthImage& img, Grid<float>& gx, Grid<float>& gy,
                           Grid<float>& mag) {
    const int w = img.width(), h = img.height();
    gx = Grid<float>(w, h, 0.0f);
    gy = Grid<float>(w, h, 0.0f);
    mag = Grid<float>(w, h, 0.0f);
    for (int y = 1; y < h - 1; y++) {
        for (int x = 1; x < w - 1; x++) {
            if (!img.is_valid(x, y) || !img.is_valid(x - 1, y) || !img.is_valid(x + 1, y) ||
                !img.is_valid(x, y - 1) || !img.is_valid(x, y + 1))
                continue;
            const float dx = (img.at(x + 1, y) - img.at(x - 1, y)) * 0.5f;
            const float dy = (img.at(x, y + 1) - img.at(x, y - 1)) * 0.5f;
            gx.at(x, y) = dx;
            gy.at(x, y) = dy;
            mag.at(x, y) = std::hypot(dx, dy);
        }
    }
}

// Non-maximum suppression along the quantized gradient direction.
inline MaskGrid gradient_nms(const Grid<float>& gx, const Grid<float>& gy,
                             const Grid<float>& mag) {
    const int w = mag.width(), h = mag.height();
    MaskGrid keep(w, h, 0);
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            const float m = mag.at(x, y);
            if (m <= 0.0f) continue;
            const float angle = std::atan2(gy.at(x, y), gx.at(x, y));
            // quantize to one of 4 directions
            const int bin = static_cast<int>(std::lround(angle / (kPi / 4.0))) & 3;
            static constexpr int off[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
            const int dx = off[bin][0], dy = off[bin][1];
            const float m1 = mag.get_or(x + dx, y + dy, 0.0f);
            const float m2 = mag.get_or(x - dx, y - dy, 0.0f);
            if (m >= m1 && m >= m2) keep.at(x, y) = 1;
        }
    }
    return keep;
}

inline MaskGrid hysteresis(const MaskGrid& keep, const Grid<float>& mag, double high,
                           double low) {
    const int w = keep.width(), h = keep.height();
    MaskGrid out(w, h, 0);
    std::vector<Vec2i> stack;
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++)
            if (keep.at(x, y) && mag.at(x, y) >= high && !out.at(x, y)) {
                out.at(x, y) = 1;
                stack.push_back({x, y});
                while (!stack.empty()) {
                    const Vec2i p = stack.back();
                    stack.pop_back();
                    for (int dy = -1; dy <= 1; dy++)
                        for (int dx = -1; dx <= 1; dx++) {
                            const int nx = p.x + dx, ny = p.y + dy;
                            if (!out.in_bounds(nx, ny) || out.at(nx, ny)) continue;
                            if (keep.at(nx, ny) && mag.at(nx, ny) >= low) {
                                out.at(nx, ny) = 1;
                                stack.push_back({nx, ny});
                            }
                        }
                }
            }
    return out;
}

} // namespace detail

/// Binary depth-edge image: local gradient maxima above the threshold, with
/// hysteresis linking, dropout borders suppressed.
inline MaskGrid detect_edges(const DepthImage& img, const EdgeConfig& cfg = {}) {
    if (img.valid_count() == 0) throw EmptyImage("detect_edges: no valid pixels");
    Grid<float> gx, gy, mag;
    detail::depth_gradient(img, gx, gy, mag);
    const MaskGrid keep = detail::gradient_nms(gx, gy, mag);
    return detail::hysteresis(keep, mag, cfg.grad_threshold_mm_px,
                              cfg.grad_threshold_mm_px * cfg.hysteresis_low_ratio);
}

namespace detail {

// Deterministic neighbor order for chain walking.
constexpr int kNbr[8][2] = {{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};

inline int edge_degree(const MaskGrid& e, int x, int y) {
    int d = 0;
    for (auto& n : kNbr) d += e.get_or(x + n[0], y + n[1], 0) != 0;
    return d;
}

// Trace pixel chains. Open chains are walked end-to-end starting from
// degree<=1 pixels; leftovers (loops) are walked from their row-major first
// pixel. Junction pixels terminate a chain.
inline std::vector<std::vector<Vec2i>> link_chains(const MaskGrid& edges) {
    const int w = edges.width(), h = edges.height();
    MaskGrid visited(w, h, 0);
    std::vector<std::vector<Vec2i>> chains;

    auto walk = [&](Vec2i start) {
        std::vector<Vec2i> chain{start};
        visited.at(start.x, start.y) = 1;
        Vec2i cur = start;
        for (;;) {
            std::optional<Vec2i> next;
            int unvisited = 0;
            for (auto& n : kNbr) {
                const int nx = cur.x + n[0], ny = cur.y + n[1];
                if (edges.get_or(nx, ny, 0) && !visited.at(nx, ny)) {
                    unvisited++;
                    if (!next) next = Vec2i{nx, ny};
                }
            }
            if (!next) break;
            visited.at(next->x, next->y) = 1;
            chain.push_back(*next);
            if (unvisited > 1 || edge_degree(edges, next->x, next->y) > 2) break;
            cur = *next;
        }
        return chain;
    };

    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++)
            if (edges.at(x, y) && !visited.at(x, y) && edge_degree(edges, x, y) <= 1)
                chains.push_back(walk({x, y}));
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++)
            if (edges.at(x, y) && !visited.at(x, y)) chains.push_back(walk({x, y}));
    return chains;
}

inline double deviation(const std::vector<Vec2i>& chain, size_t a, size_t b, size_t i) {
    const Vec2 pa{static_cast<double>(chain[a].x), static_cast<double>(chain[a].y)};
    const Vec2 pb{static_cast<double>(chain[b].x), static_cast<double>(chain[b].y)};
    const Vec2 pi{static_cast<double>(chain[i].x), static_cast<double>(chain[i].y)};
    return point_segment_distance_2d(pi, pa, pb);
}

// Recursive max-deviation split; returns breakpoint indices including both ends.
inline void split_chain(const std::vector<Vec2i>& chain, size_t a, size_t b, double tol,
                        std::vector<size_t>& breaks) {
    double worst = 0.0;
    size_t worst_i = a;
    for (size_t i = a + 1; i < b; i++) {
        const double d = deviation(chain, a, b, i);
        if (d > worst) {
            worst = d;
            worst_i = i;
        }
    }
    if (worst > tol) {
        split_chain(chain, a, worst_i, tol, breaks);
        split_chain(chain, worst_i, b, tol, breaks);
    } else {
        breaks.push_back(b);
    }
}

struct Span2D {
    size_t a, b; // index range into the chain
};

inline double span_angle(const std::vector<Vec2i>& chain, const Span2D& s) {
    return std::atan2(chain[s.b].y - chain[s.a].y, chain[s.b].x - chain[s.a].x);
}

inline double max_span_deviation(const std::vector<Vec2i>& chain, size_t a, size_t b) {
    double worst = 0.0;
    for (size_t i = a + 1; i < b; i++) worst = std::max(worst, deviation(chain, a, b, i));
    return worst;
}

// Merge near-collinear neighbors when the merged span still fits the tolerance.
inline std::vector<Span2D> merge_spans(const std::vector<Vec2i>& chain, std::vector<Span2D> spans,
                                       double angle_tol_rad, double fit_tol) {
    bool merged = true;
    while (merged && spans.size() > 1) {
        merged = false;
        std::vector<Span2D> out;
        size_t i = 0;
        while (i < spans.size()) {
            if (i + 1 < spans.size()) {
                double da = std::fabs(span_angle(chain, spans[i]) - span_angle(chain, spans[i + 1]));
                if (da > kPi) da = 2 * kPi - da;
                if (da < angle_tol_rad &&
                    max_span_deviation(chain, spans[i].a, spans[i + 1].b) <= fit_tol) {
                    out.push_back({spans[i].a, spans[i + 1].b});
                    i += 2;
                    merged = true;
                    continue;
                }
            }
            out.push_back(spans[i]);
            i++;
        }
        spans = std::move(out);
    }
    return spans;
}

/// Minimum valid depth in the 3x3 neighborhood: an edge pixel sits on a depth
/// discontinuity, and the nearer surface is the object that owns the contour.
inline std::optional<double> robust_endpoint_depth(const DepthImage& img, Vec2i p) {
    double best = std::numeric_limits<double>::max();
    bool any = false;
    for (int dy = -1; dy <= 1; dy++)
        for (int dx = -1; dx <= 1; dx++) {
            const int x = p.x + dx, y = p.y + dy;
            if (img.is_valid(x, y)) {
                best = std::min(best, static_cast<double>(img.at(x, y)));
                any = true;
            }
        }
    if (!any) return std::nullopt;
    return best;
}

} // namespace detail

/// Fit straight 2D segments to edge chains and lift them to camera space.
inline EdgeSegmentSet fit_segments(const MaskGrid& edges, const DepthImage& img,
                                   const EdgeConfig& cfg = {}) {
    struct Piece {
        Vec2 p0, p1;
    };
    std::vector<Piece> pieces;

    for (const auto& chain : detail::link_chains(edges)) {
        if (chain.size() < 2) continue;
        std::vector<size_t> breaks{0};
        detail::split_chain(chain, 0, chain.size() - 1, cfg.fit_tolerance_px, breaks);
        std::vector<detail::Span2D> spans;
        for (size_t k = 0; k + 1 < breaks.size(); k++) spans.push_back({breaks[k], breaks[k + 1]});
        spans = detail::merge_spans(chain, std::move(spans),
                                    deg_to_rad(cfg.merge_angle_deg), cfg.fit_tolerance_px);
        for (const auto& s : spans) {
            const Vec2 a{static_cast<double>(chain[s.a].x), static_cast<double>(chain[s.a].y)};
            const Vec2 b{static_cast<double>(chain[s.b].x), static_cast<double>(chain[s.b].y)};
            const double len = norm(b - a);
            if (len < cfg.min_segment_len_px) continue;
            // long chords on curved silhouettes degrade GLI resolution
            const int parts = std::max(1, static_cast<int>(std::ceil(len / cfg.max_segment_len_px)));
            for (int k = 0; k < parts; k++) {
                const Vec2 q0 = a + (static_cast<double>(k) / parts) * (b - a);
                const Vec2 q1 = a + (static_cast<double>(k + 1) / parts) * (b - a);
                if (norm(q1 - q0) >= cfg.min_segment_len_px) pieces.push_back({q0, q1});
            }
        }
    }

    std::vector<Segment3D> segs;
    segs.reserve(pieces.size());
    for (const auto& p : pieces) {
        const Vec2i i0{static_cast<int>(std::lround(p.p0.x)), static_cast<int>(std::lround(p.p0.y))};
        const Vec2i i1{static_cast<int>(std::lround(p.p1.x)), static_cast<int>(std::lround(p.p1.y))};
        const auto d0 = detail::robust_endpoint_depth(img, i0);
        const auto d1 = detail::robust_endpoint_depth(img, i1);
        if (!d0 || !d1) continue;
        const Vec3 w0 = backproject(p.p0, *d0, img.intrinsics);
        const Vec3 w1 = backproject(p.p1, *d1, img.intrinsics);
        if (!(norm(w1 - w0) > cfg.min_segment_len_mm)) continue;
        segs.emplace_back(w0, w1, p.p0, p.p1, cfg.min_segment_len_mm);
    }

    // deterministic cap: keep the longest pixel spans, preserve original order
    if (static_cast<int>(segs.size()) > cfg.max_segments) {
        std::vector<size_t> idx(segs.size());
        std::iota(idx.begin(), idx.end(), size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            return segs[a].pixel_length() > segs[b].pixel_length();
        });
        idx.resize(cfg.max_segments);
        std::sort(idx.begin(), idx.end());
        std::vector<Segment3D> kept;
        kept.reserve(idx.size());
        for (size_t i : idx) kept.push_back(segs[i]);
        segs = std::move(kept);
    }

    return EdgeSegmentSet(std::move(segs), img.width(), img.height());
}

/// Full extraction: edges then segments.
inline EdgeSegmentSet extract_segments(const DepthImage& img, const EdgeConfig& cfg = {}) {
    return fit_segments(detect_edges(img, cfg), img, cfg);
}

} // namespace tanglemap
