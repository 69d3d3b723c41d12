#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "tanglemap/depth_image.hpp"
#include "tanglemap/errors.hpp"
#include "tanglemap/geometry.hpp"
#include "tanglemap/grid.hpp"

namespace tanglemap {

/// Parallel-jaw footprint, pixel units. The fingers descend at the open
/// width; the material they occupy while lowering must be clear of objects,
/// and the span they sweep while closing must contain the object.
struct HandGeometry {
    int open_width_px = 60;   // clearance between the finger inner faces
    int finger_width_px = 15; // finger material thickness along the closing axis
    int finger_height_px = 10;
    int palm_height_px = 0;   // optional palm bar behind the fingers, 0 = above the slice

    void check() const {
        if (open_width_px <= 0 || finger_width_px <= 0 || finger_height_px <= 0 ||
            palm_height_px < 0)
            throw InvalidGeometry("hand geometry must be positive");
    }
};

struct StampRun {
    int dy;       // row offset from the stamp center
    int dx0, dx1; // inclusive column span
};

/// One rotated gripper stamp. Offsets are relative to the grasp point.
struct HandTemplate {
    HandGeometry geom;
    double rotation_deg = 0.0;
    int rotation_index = 0;
    int half = 0; // stamp spans [-half, half] in both axes
    MaskGrid contact, collision;
    std::vector<StampRun> contact_runs, collision_runs;
    std::vector<Vec2i> contact_offsets, collision_offsets;
};

namespace detail {

struct HandRect { // axis-aligned in the unrotated hand frame
    double x0, x1, y0, y1;
    bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

inline std::vector<StampRun> mask_to_runs(const MaskGrid& m, int half) {
    std::vector<StampRun> runs;
    for (int y = 0; y < m.height(); y++) {
        int x = 0;
        while (x < m.width()) {
            if (!m.at(x, y)) {
                x++;
                continue;
            }
            int x1 = x;
            while (x1 + 1 < m.width() && m.at(x1 + 1, y)) x1++;
            runs.push_back({y - half, x - half, x1 - half});
            x = x1 + 1;
        }
    }
    return runs;
}

inline std::vector<Vec2i> mask_to_offsets(const MaskGrid& m, int half) {
    std::vector<Vec2i> offs;
    for (int y = 0; y < m.height(); y++)
        for (int x = 0; x < m.width(); x++)
            if (m.at(x, y)) offs.push_back({x - half, y - half});
    return offs;
}

} // namespace detail

/// Rasterize the jaw footprint at R orientations spaced 180/R degrees (a
/// parallel jaw repeats after half a turn). Contact covers the closing sweep
/// between the fingers; collision covers the finger (and optional palm)
/// material at the open position. Pixel-center sampling keeps every stamp
/// exactly symmetric under a 180-degree flip.
inline std::vector<HandTemplate> build_templates(const HandGeometry& geom, int rotations = 4) {
    geom.check();
    if (rotations < 1) throw InvalidGeometry("need at least one rotation");

    const double hw = geom.open_width_px / 2.0;
    const double hh = geom.finger_height_px / 2.0;
    const detail::HandRect sweep{-hw + 0.5, hw - 0.5, -hh, hh};
    const detail::HandRect finger_l{-hw - geom.finger_width_px, -hw, -hh, hh};
    const detail::HandRect finger_r{hw, hw + geom.finger_width_px, -hh, hh};
    // optional palm bar behind the fingers, mirrored to keep the stamp
    // symmetric under a half turn
    const detail::HandRect palm{-hw - geom.finger_width_px, hw + geom.finger_width_px,
                                hh, hh + geom.palm_height_px};

    const double reach = std::hypot(hw + geom.finger_width_px, hh + geom.palm_height_px) + 1.0;
    const int half = static_cast<int>(std::ceil(reach));
    const int side = 2 * half + 1;

    std::vector<HandTemplate> out;
    for (int k = 0; k < rotations; k++) {
        HandTemplate t;
        t.geom = geom;
        t.rotation_index = k;
        t.rotation_deg = 180.0 * k / rotations;
        t.half = half;
        t.contact = MaskGrid(side, side, 0);
        t.collision = MaskGrid(side, side, 0);
        const double a = deg_to_rad(t.rotation_deg);
        const double c = std::cos(a), s = std::sin(a);
        for (int y = 0; y < side; y++) {
            for (int x = 0; x < side; x++) {
                const double dx = x - half, dy = y - half;
                // rotate the pixel back into the hand frame
                const double hx = c * dx + s * dy;
                const double hy = -s * dx + c * dy;
                const bool in_palm = geom.palm_height_px > 0 &&
                                     (palm.contains(hx, hy) || palm.contains(-hx, -hy));
                if (finger_l.contains(hx, hy) || finger_r.contains(hx, hy) || in_palm)
                    t.collision.at(x, y) = 1;
                else if (sweep.contains(hx, hy))
                    t.contact.at(x, y) = 1;
            }
        }
        t.contact_runs = detail::mask_to_runs(t.contact, half);
        t.collision_runs = detail::mask_to_runs(t.collision, half);
        t.contact_offsets = detail::mask_to_offsets(t.contact, half);
        t.collision_offsets = detail::mask_to_offsets(t.collision, half);
        if (t.contact_offsets.empty() || t.collision_offsets.empty())
            throw InvalidGeometry("hand geometry rasterizes to an empty stamp");
        out.push_back(std::move(t));
    }
    return out;
}

/// Scene pixels nearer than the given plane.
inline MaskGrid binarize_at(const DepthImage& img, double plane_mm) {
    MaskGrid o(img.width(), img.height(), 0);
    for (int y = 0; y < img.height(); y++)
        for (int x = 0; x < img.width(); x++)
            if (img.is_valid(x, y) && img.at(x, y) < plane_mm) o.at(x, y) = 1;
    return o;
}

namespace detail {

// Exact binary cross-correlation via per-row prefix sums over the stamp's
// row runs; identical to stamping the offset set directly.
inline Grid<int32_t> correlate_runs(const MaskGrid& o, const std::vector<StampRun>& runs) {
    const int w = o.width(), h = o.height();
    // prefix[y][x] = number of object pixels in row y left of column x
    Grid<int32_t> prefix(w + 1, h, 0);
    for (int y = 0; y < h; y++) {
        int32_t acc = 0;
        for (int x = 0; x < w; x++) {
            acc += o.at(x, y);
            prefix.at(x + 1, y) = acc;
        }
    }
    Grid<int32_t> resp(w, h, 0);
    for (const auto& r : runs) {
        for (int y = 0; y < h; y++) {
            const int sy = y + r.dy;
            if (sy < 0 || sy >= h) continue;
            for (int x = 0; x < w; x++) {
                const int a = std::clamp(x + r.dx0, 0, w);
                const int b = std::clamp(x + r.dx1 + 1, 0, w);
                if (b > a) resp.at(x, y) += prefix.at(b, sy) - prefix.at(a, sy);
            }
        }
    }
    return resp;
}

// Separable Gaussian, zero padding at borders.
inline Grid<double> gaussian_blur(const Grid<double>& src, double sigma) {
    if (sigma <= 0.0) return src;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; i++) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    const int w = src.width(), h = src.height();
    Grid<double> tmp(w, h, 0.0), out(w, h, 0.0);
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++) {
            double v = 0.0;
            for (int i = -radius; i <= radius; i++)
                v += kernel[i + radius] * src.get_or(x + i, y, 0.0);
            tmp.at(x, y) = v;
        }
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++) {
            double v = 0.0;
            for (int i = -radius; i <= radius; i++)
                v += kernel[i + radius] * tmp.get_or(x, y + i, 0.0);
            out.at(x, y) = v;
        }
    return out;
}

} // namespace detail

/// Graspability response of one template against the binary scene sliced at
/// plane_mm. Contact response is Gaussian-smoothed; the collision response is
/// not smoothed and gates with strict equality to zero. Poses whose raw
/// contact count is zero stay zero (blur must not invent contact).
inline Grid<double> graspability_response(const MaskGrid& object, const HandTemplate& tmpl,
                                          double smooth_sigma_px) {
    const Grid<int32_t> contact = detail::correlate_runs(object, tmpl.contact_runs);
    const Grid<int32_t> collision = detail::correlate_runs(object, tmpl.collision_runs);
    Grid<double> raw(object.width(), object.height(), 0.0);
    for (size_t i = 0; i < raw.size(); i++) raw.data()[i] = contact.data()[i];
    Grid<double> smooth = detail::gaussian_blur(raw, smooth_sigma_px);
    Grid<double> g(object.width(), object.height(), 0.0);
    for (size_t i = 0; i < g.size(); i++)
        g.data()[i] = (collision.data()[i] == 0 && contact.data()[i] > 0) ? smooth.data()[i] : 0.0;
    return g;
}

/// Single-slice graspability map: slice the scene one grasp depth below the
/// nearest surface and evaluate the template there.
inline Grid<double> graspability_map(const DepthImage& img, const HandTemplate& tmpl,
                                     double grasp_depth_mm,
                                     double smooth_sigma_px = -1.0) {
    const double plane = img.min_valid_depth() + grasp_depth_mm;
    if (smooth_sigma_px < 0.0) smooth_sigma_px = tmpl.geom.finger_width_px / 2.0;
    return graspability_response(binarize_at(img, plane), tmpl, smooth_sigma_px);
}

struct GraspConfig {
    HandGeometry hand;
    int rotations = 4;
    double grasp_depth_mm = 25.0;
    int max_slices = 6;           // deeper slices reach objects below the pile top
    double floor_margin_mm = 5.0; // keep slices clear of the support surface
    int top_k = 5;
    double nms_radius_px = -1.0;  // default: finger width
};

/// Per-rotation graspability over several slice depths (per-pixel max), with
/// the winning slice plane retained for collision rechecks.
struct GraspMaps {
    std::vector<Grid<double>> score;   // one per rotation
    std::vector<Grid<float>> plane_mm; // slice plane used for the winning score
    std::vector<double> planes;
};

inline GraspMaps multi_slice_graspability(const DepthImage& img,
                                          const std::vector<HandTemplate>& templates,
                                          const GraspConfig& cfg) {
    GraspMaps maps;
    const int w = img.width(), h = img.height();
    maps.score.assign(templates.size(), Grid<double>(w, h, 0.0));
    maps.plane_mm.assign(templates.size(), Grid<float>(w, h, 0.0f));

    const double zmin = img.min_valid_depth();
    const double zmax = img.max_valid_depth();
    for (int k = 1; k <= cfg.max_slices; k++) {
        const double plane = zmin + k * cfg.grasp_depth_mm;
        if (plane > zmax - cfg.floor_margin_mm) break;
        maps.planes.push_back(plane);
    }

    const double sigma = cfg.hand.finger_width_px / 2.0;
    for (const double plane : maps.planes) {
        const MaskGrid object = binarize_at(img, plane);
        for (size_t r = 0; r < templates.size(); r++) {
            const Grid<double> g = graspability_response(object, templates[r], sigma);
            for (int y = 0; y < h; y++)
                for (int x = 0; x < w; x++)
                    if (g.at(x, y) > maps.score[r].at(x, y)) {
                        maps.score[r].at(x, y) = g.at(x, y);
                        maps.plane_mm[r].at(x, y) = static_cast<float>(plane);
                    }
        }
    }
    return maps;
}

/// One detected pose. Entanglement and the final score are filled in by the
/// planner.
struct GraspCandidate {
    Vec2i pos;
    int rotation_index = 0;
    double depth_mm = 0.0;
    double graspability = 0.0;
    double entanglement = 0.0;
    double score = 0.0;
    double plane_mm = 0.0; // slice the pose was detected at
};

/// Local maxima across all rotations inside the region, greedy non-maximum
/// suppression, best top_k by graspability. Candidate depth is the nearest
/// valid sample under the contact stamp.
inline std::vector<GraspCandidate> extract_candidates(const GraspMaps& maps,
                                                      const DepthImage& img,
                                                      const std::vector<HandTemplate>& templates,
                                                      const Rect& region, int top_k,
                                                      double nms_radius_px) {
    struct Peak {
        double v;
        int x, y, r;
    };
    std::vector<Peak> peaks;
    for (size_t r = 0; r < maps.score.size(); r++) {
        const auto& g = maps.score[r];
        for (int y = region.y; y < region.y + region.h; y++) {
            for (int x = region.x; x < region.x + region.w; x++) {
                if (!g.in_bounds(x, y)) continue;
                const double v = g.at(x, y);
                if (v <= 0.0) continue;
                bool is_max = true;
                for (int dy = -1; dy <= 1 && is_max; dy++)
                    for (int dx = -1; dx <= 1 && is_max; dx++)
                        if ((dx || dy) && g.get_or(x + dx, y + dy, 0.0) > v) is_max = false;
                if (is_max) peaks.push_back({v, x, y, static_cast<int>(r)});
            }
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        if (a.v != b.v) return a.v > b.v;
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        return a.r < b.r;
    });

    const double rad2 = nms_radius_px * nms_radius_px;
    std::vector<GraspCandidate> out;
    for (const Peak& p : peaks) {
        if (static_cast<int>(out.size()) >= top_k) break;
        bool suppressed = false;
        for (const auto& c : out) {
            const double dx = c.pos.x - p.x, dy = c.pos.y - p.y;
            if (dx * dx + dy * dy < rad2) {
                suppressed = true;
                break;
            }
        }
        if (suppressed) continue;

        GraspCandidate c;
        c.pos = {p.x, p.y};
        c.rotation_index = p.r;
        c.graspability = p.v;
        c.plane_mm = maps.plane_mm[p.r].at(p.x, p.y);
        double depth = std::numeric_limits<double>::max();
        for (const Vec2i off : templates[p.r].contact_offsets) {
            const int x = p.x + off.x, y = p.y + off.y;
            if (img.is_valid(x, y)) depth = std::min(depth, static_cast<double>(img.at(x, y)));
        }
        c.depth_mm = depth == std::numeric_limits<double>::max() ? 0.0 : depth;
        out.push_back(c);
    }
    return out;
}

/// Direct stamp recheck, independent of the correlation path: true when no
/// object pixel at the candidate's slice lies under the collision stamp.
inline bool recheck_collision_free(const DepthImage& img, const GraspCandidate& cand,
                                   const std::vector<HandTemplate>& templates) {
    const auto& tmpl = templates[cand.rotation_index];
    for (const Vec2i off : tmpl.collision_offsets) {
        const int x = cand.pos.x + off.x, y = cand.pos.y + off.y;
        if (img.is_valid(x, y) && img.at(x, y) < cand.plane_mm) return false;
    }
    return true;
}

} // namespace tanglemap
