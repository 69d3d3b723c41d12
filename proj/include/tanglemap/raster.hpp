#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "tanglemap/geometry.hpp"
#include "tanglemap/grid.hpp"

namespace tanglemap {

/// Bresenham line; out-of-bounds pixels are clipped silently.
template <typename T>
void draw_line(Grid<T>& g, Vec2i a, Vec2i b, T value) {
    int x0 = a.x, y0 = a.y, x1 = b.x, y1 = b.y;
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        if (g.in_bounds(x0, y0)) g.at(x0, y0) = value;
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

/// Chebyshev-ball (square) dilation by radius px.
inline MaskGrid dilate(const MaskGrid& src, int radius) {
    if (radius <= 0) return src;
    // two-pass separable max filter
    MaskGrid tmp(src.width(), src.height(), 0);
    for (int y = 0; y < src.height(); y++) {
        for (int x = 0; x < src.width(); x++) {
            uint8_t v = 0;
            for (int k = -radius; k <= radius && !v; k++) v = src.get_or(x + k, y, 0);
            tmp.at(x, y) = v;
        }
    }
    MaskGrid out(src.width(), src.height(), 0);
    for (int y = 0; y < src.height(); y++) {
        for (int x = 0; x < src.width(); x++) {
            uint8_t v = 0;
            for (int k = -radius; k <= radius && !v; k++) v = tmp.get_or(x, y + k, 0);
            out.at(x, y) = v;
        }
    }
    return out;
}

inline void draw_disk(MaskGrid& g, Vec2i c, int radius, uint8_t value = 1) {
    for (int dy = -radius; dy <= radius; dy++)
        for (int dx = -radius; dx <= radius; dx++)
            if (dx * dx + dy * dy <= radius * radius && g.in_bounds(c.x + dx, c.y + dy))
                g.at(c.x + dx, c.y + dy) = value;
}

} // namespace tanglemap
