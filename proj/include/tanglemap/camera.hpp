#pragma once

#include "tanglemap/errors.hpp"
#include "tanglemap/geometry.hpp"

namespace tanglemap {

/// Pinhole intrinsics, pixel units.
struct Intrinsics {
    double fx = 1000.0, fy = 1000.0;
    double cx = 0.0, cy = 0.0;

    static Intrinsics centered(double fx, double fy, int width, int height) {
        return {fx, fy, (width - 1) / 2.0, (height - 1) / 2.0};
    }
};

inline Vec3 backproject(Vec2 px, double depth_mm, const Intrinsics& k) {
    if (!(depth_mm > 0.0)) throw NonPositiveDepth("backproject needs depth > 0");
    return {(px.x - k.cx) * depth_mm / k.fx, (px.y - k.cy) * depth_mm / k.fy, depth_mm};
}

inline Vec2 project(Vec3 p, const Intrinsics& k) {
    if (!(p.z > 0.0)) throw NonPositiveDepth("project needs z > 0");
    return {p.x * k.fx / p.z + k.cx, p.y * k.fy / p.z + k.cy};
}

} // namespace tanglemap
