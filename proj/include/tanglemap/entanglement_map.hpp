#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tanglemap/edge_extract.hpp"
#include "tanglemap/errors.hpp"
#include "tanglemap/grid.hpp"
#include "tanglemap/writhe.hpp"

namespace tanglemap {

using EntanglementMap = Grid<double>;

struct WindowCell {
    double writhe = 0.0;
    double density = 0.0;
    int segment_count = 0;
};

/// Sliding-window layout plus the per-window topology attributes. Windows
/// tile the image with the configured stride; a final row/column clamped to
/// the border is appended when the stride does not cover the image exactly.
struct WindowGrid {
    int window_w = 0, window_h = 0;
    std::vector<int> xs, ys; // window origins
    Grid<WindowCell> cells;  // indexed [col, row] = [x-index, y-index]

    int cols() const { return static_cast<int>(xs.size()); }
    int rows() const { return static_cast<int>(ys.size()); }

    Rect window_rect(int col, int row) const {
        return {xs[col], ys[row], window_w, window_h};
    }
    // Anchor pixel used as the interpolation sample point for a cell.
    double center_x(int col) const { return xs[col] + window_w / 2; }
    double center_y(int row) const { return ys[row] + window_h / 2; }

    double mean_density() const {
        if (cells.empty()) return 0.0;
        double s = 0.0;
        for (const auto& c : cells.data()) s += c.density;
        return s / static_cast<double>(cells.size());
    }
};

/// Blend weights for the map composition; always sums to 1.
struct MapWeights {
    double sigma_w = 0.8;
    double sigma_d = 0.15;
    double sigma_c = 0.05;

    void check() const {
        if (sigma_w < 0 || sigma_d < 0 || sigma_c < 0 ||
            std::fabs(sigma_w + sigma_d + sigma_c - 1.0) > 1e-12)
            throw InvalidParams("map weights must be non-negative and sum to 1");
    }
};

struct MapConfig {
    double window_frac = 0.25;  // window size as a fraction of each image dimension
    double stride_frac = 0.5;   // stride as a fraction of the window (50% overlap)
    MapWeights initial_weights;
    double sigma_d_max = 0.5;   // keeps the adapted writhe weight positive
    int center_dilation_px = 8;
    double eps_intersect_mm = kEpsIntersectMm;
};

namespace detail {

inline std::vector<int> window_origins(int image_dim, int window, int stride) {
    std::vector<int> xs;
    for (int x = 0; x + window <= image_dim; x += stride) xs.push_back(x);
    if (xs.empty() || xs.back() + window < image_dim) xs.push_back(image_dim - window);
    return xs;
}

} // namespace detail

/// Per-window writhe and density over the segments whose pixel footprint
/// touches the window. Segments are used whole; clipping would change the
/// integrals and make cells incomparable.
inline WindowGrid sliding_topology(const EdgeSegmentSet& set, Vec2i window_px, Vec2i stride_px,
                                   double eps_intersect_mm = kEpsIntersectMm) {
    if (window_px.x <= 0 || window_px.y <= 0 || stride_px.x <= 0 || stride_px.y <= 0)
        throw InvalidParams("window and stride must be positive");
    if (window_px.x > set.width || window_px.y > set.height)
        throw WindowLargerThanImage("sliding window exceeds image size");

    WindowGrid grid;
    grid.window_w = window_px.x;
    grid.window_h = window_px.y;
    grid.xs = detail::window_origins(set.width, window_px.x, stride_px.x);
    grid.ys = detail::window_origins(set.height, window_px.y, stride_px.y);
    grid.cells = Grid<WindowCell>(grid.cols(), grid.rows());

    const int n = static_cast<int>(set.segments.size());

    // one full pairwise matrix, shared by every window
    WritheMatrix full;
    if (n >= 2) full = writhe_matrix(set.segments, eps_intersect_mm);

    std::vector<std::vector<int>> members(static_cast<size_t>(grid.cols()) * grid.rows());
    for (int i = 0; i < n; i++) {
        const Segment3D& s = set.segments[i];
        for (int row = 0; row < grid.rows(); row++)
            for (int col = 0; col < grid.cols(); col++)
                if (segment_intersects_rect(s.pixel_p0, s.pixel_p1, grid.window_rect(col, row)))
                    members[static_cast<size_t>(row) * grid.cols() + col].push_back(i);
    }

    for (int row = 0; row < grid.rows(); row++) {
        for (int col = 0; col < grid.cols(); col++) {
            const auto& m = members[static_cast<size_t>(row) * grid.cols() + col];
            WindowCell cell;
            cell.segment_count = static_cast<int>(m.size());
            if (m.size() >= 2) {
                WritheMatrix sub(static_cast<int>(m.size()));
                for (size_t a = 0; a < m.size(); a++)
                    for (size_t b = a + 1; b < m.size(); b++)
                        sub.set(static_cast<int>(a), static_cast<int>(b), full.at(m[a], m[b]));
                cell.writhe = writhe(sub);
                cell.density = density(sub);
            }
            grid.cells.at(col, row) = cell;
        }
    }
    return grid;
}

/// Density-driven weight adaptation: when the windows report more density
/// than the whole scene, shift weight from writhe to density (capped so the
/// writhe weight stays positive). No-op when global density is zero.
inline MapWeights adapt_weights(const MapWeights& initial, const WindowGrid& grid,
                                double global_density, double sigma_d_max = 0.5) {
    initial.check();
    const double mean_d = grid.mean_density();
    if (!(global_density > 0.0) || mean_d <= global_density) return initial;
    MapWeights out = initial;
    out.sigma_d = std::min(initial.sigma_d * (mean_d / global_density),
                           std::min(sigma_d_max, 1.0 - initial.sigma_c));
    out.sigma_w = 1.0 - out.sigma_d - out.sigma_c;
    out.check();
    return out;
}

namespace detail {

// Min-max normalize a cell attribute across the grid; constant grids become
// all zeros (no contrast carries no information).
inline Grid<double> normalized_cells(const WindowGrid& g, double WindowCell::* attr) {
    Grid<double> out(g.cols(), g.rows(), 0.0);
    double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
    for (const auto& c : g.cells.data()) {
        lo = std::min(lo, c.*attr);
        hi = std::max(hi, c.*attr);
    }
    if (!(hi > lo)) return out;
    for (int r = 0; r < g.rows(); r++)
        for (int c = 0; c < g.cols(); c++)
            out.at(c, r) = (g.cells.at(c, r).*attr - lo) / (hi - lo);
    return out;
}

// Bilinear upsample anchored at window anchor pixels; pixels beyond the
// outermost anchors take the nearest cell value.
inline Grid<double> upsample_bilinear(const Grid<double>& cells, const WindowGrid& g, int width,
                                      int height) {
    Grid<double> out(width, height, 0.0);
    const int nc = g.cols(), nr = g.rows();
    for (int y = 0; y < height; y++) {
        int r0 = 0;
        while (r0 + 1 < nr && g.center_y(r0 + 1) <= y) r0++;
        const int r1 = std::min(r0 + 1, nr - 1);
        const double cy0 = g.center_y(r0), cy1 = g.center_y(r1);
        double ty = 0.0;
        if (cy1 > cy0) ty = std::clamp((y - cy0) / (cy1 - cy0), 0.0, 1.0);
        for (int x = 0; x < width; x++) {
            int c0 = 0;
            while (c0 + 1 < nc && g.center_x(c0 + 1) <= x) c0++;
            const int c1 = std::min(c0 + 1, nc - 1);
            const double cx0 = g.center_x(c0), cx1 = g.center_x(c1);
            double tx = 0.0;
            if (cx1 > cx0) tx = std::clamp((x - cx0) / (cx1 - cx0), 0.0, 1.0);
            const double v0 = cells.at(c0, r0) * (1 - tx) + cells.at(c1, r0) * tx;
            const double v1 = cells.at(c0, r1) * (1 - tx) + cells.at(c1, r1) * tx;
            out.at(x, y) = v0 * (1 - ty) + v1 * ty;
        }
    }
    return out;
}

} // namespace detail

/// Weighted blend of the interpolated window attributes and the center mask,
/// clamped to [0,1].
inline EntanglementMap compose_map(const WindowGrid& grid, const CenterMask& mask,
                                   const MapWeights& weights) {
    weights.check();
    if (grid.cols() == 0 || grid.rows() == 0) throw InvalidParams("empty window grid");
    if (mask.width() <= 0 || mask.height() <= 0) throw DimensionMismatch("empty center mask");

    const int w = mask.width(), h = mask.height();
    const Grid<double> wn = detail::normalized_cells(grid, &WindowCell::writhe);
    const Grid<double> dn = detail::normalized_cells(grid, &WindowCell::density);
    const Grid<double> wu = detail::upsample_bilinear(wn, grid, w, h);
    const Grid<double> du = detail::upsample_bilinear(dn, grid, w, h);

    EntanglementMap map(w, h, 0.0);
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++) {
            const double v = weights.sigma_w * wu.at(x, y) + weights.sigma_d * du.at(x, y) +
                             weights.sigma_c * (mask.at(x, y) ? 1.0 : 0.0);
            map.at(x, y) = std::clamp(v, 0.0, 1.0);
        }
    return map;
}

/// Everything the end-to-end map generation produces; intermediates are kept
/// for visualization and the planner.
struct GenerateResult {
    EdgeSegmentSet segments;
    WritheMatrix matrix;       // empty when fewer than 2 segments
    TopologyCoordinate coordinate;
    CenterMask mask;
    WindowGrid grid;
    MapWeights weights;
    EntanglementMap map;
};

/// Depth image -> entanglement map. A scene with fewer than two segments has
/// nothing to entangle: the result is a zero coordinate and an all-zero map.
inline GenerateResult generate(const DepthImage& img, const EdgeConfig& edge_cfg = {},
                               const MapConfig& map_cfg = {}) {
    GenerateResult r;
    r.segments = extract_segments(img, edge_cfg);
    r.mask = CenterMask(img.width(), img.height(), 0);
    r.weights = map_cfg.initial_weights;

    const Vec2i window{std::max(1, static_cast<int>(img.width() * map_cfg.window_frac)),
                       std::max(1, static_cast<int>(img.height() * map_cfg.window_frac))};
    const Vec2i stride{std::max(1, static_cast<int>(window.x * map_cfg.stride_frac)),
                       std::max(1, static_cast<int>(window.y * map_cfg.stride_frac))};

    if (r.segments.size() < 2) {
        r.grid = sliding_topology(r.segments, window, stride, map_cfg.eps_intersect_mm);
        r.map = EntanglementMap(img.width(), img.height(), 0.0);
        return r;
    }

    r.matrix = writhe_matrix(r.segments.segments, map_cfg.eps_intersect_mm);
    r.coordinate.writhe = writhe(r.matrix);
    r.coordinate.density = density(r.matrix);
    if (r.matrix.sum() > 0.0) {
        r.coordinate.center = center(r.matrix);
        r.mask = center_mask(r.segments.segments, *r.coordinate.center, img.width(), img.height(),
                             map_cfg.center_dilation_px);
    }

    r.grid = sliding_topology(r.segments, window, stride, map_cfg.eps_intersect_mm);
    r.weights = adapt_weights(map_cfg.initial_weights, r.grid, r.coordinate.density,
                              map_cfg.sigma_d_max);
    r.map = compose_map(r.grid, r.mask, r.weights);
    return r;
}

} // namespace tanglemap
