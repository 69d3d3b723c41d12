#pragma once

#include <cmath>
#include <limits>

#include "tanglemap/camera.hpp"
#include "tanglemap/errors.hpp"
#include "tanglemap/grid.hpp"

namespace tanglemap {

constexpr double kDefaultMaxRangeMm = 2000.0;

/// Single-channel depth map in millimeters with an explicit validity mask.
/// Invalid pixels are flagged, never encoded as zero depth internally.
struct DepthImage {
    Grid<float> depth;      // mm
    MaskGrid valid;         // 1 = usable sample
    Intrinsics intrinsics;

    DepthImage() = default;
    DepthImage(int width, int height, const Intrinsics& k)
        : depth(width, height, 0.0f), valid(width, height, 0), intrinsics(k) {}

    int width() const { return depth.width(); }
    int height() const { return depth.height(); }

    bool is_valid(int x, int y) const { return valid.get_or(x, y, 0) != 0; }
    float at(int x, int y) const { return depth.at(x, y); }

    void set(int x, int y, float mm) {
        depth.at(x, y) = mm;
        valid.at(x, y) = 1;
    }
    void invalidate(int x, int y) {
        valid.at(x, y) = 0;
        depth.at(x, y) = 0.0f;
    }

    int valid_count() const {
        int n = 0;
        for (uint8_t v : valid.data()) n += v != 0;
        return n;
    }

    /// Smallest / largest valid depth; throws EmptyImage when nothing is valid.
    float min_valid_depth() const {
        float m = std::numeric_limits<float>::max();
        bool any = false;
        for (int y = 0; y < height(); y++)
            for (int x = 0; x < width(); x++)
                if (is_valid(x, y)) {
                    m = std::min(m, at(x, y));
                    any = true;
                }
        if (!any) throw EmptyImage("depth image has no valid pixels");
        return m;
    }
    float max_valid_depth() const {
        float m = 0.0f;
        bool any = false;
        for (int y = 0; y < height(); y++)
            for (int x = 0; x < width(); x++)
                if (is_valid(x, y)) {
                    m = std::max(m, at(x, y));
                    any = true;
                }
        if (!any) throw EmptyImage("depth image has no valid pixels");
        return m;
    }

    /// Range check for freshly constructed or loaded images.
    void validate(double max_range_mm = kDefaultMaxRangeMm) const {
        for (int y = 0; y < height(); y++)
            for (int x = 0; x < width(); x++)
                if (is_valid(x, y)) {
                    const float d = at(x, y);
                    if (!(d > 0.0f) || d >= max_range_mm || !std::isfinite(d))
                        throw InvalidParams("depth sample out of range at (" +
                                            std::to_string(x) + "," + std::to_string(y) + ")");
                }
    }
};

} // namespace tanglemap
