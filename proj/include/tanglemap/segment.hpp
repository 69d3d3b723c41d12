#pragma once

#include <utility>
#include <vector>

#include "tanglemap/errors.hpp"
#include "tanglemap/geometry.hpp"

namespace tanglemap {

// Segments shorter than this are meaningless for link integrals and are
// rejected at construction.
constexpr double kMinSegmentLenMm = 1.0;

// Pairs closer than this are treated as touching (see gli_segments).
constexpr double kEpsIntersectMm = 1e-9;

/// Oriented straight segment in camera coordinates (mm) together with the
/// 2D pixel span it was extracted from.
struct Segment3D {
    Vec3 p0, p1;
    Vec2 pixel_p0, pixel_p1;

    Segment3D(Vec3 a, Vec3 b, Vec2 pa, Vec2 pb, double min_len_mm = kMinSegmentLenMm)
        : p0(a), p1(b), pixel_p0(pa), pixel_p1(pb) {
        if (!(norm(b - a) > min_len_mm))
            throw DegenerateSegment("segment length " + std::to_string(norm(b - a)) +
                                    " mm below minimum " + std::to_string(min_len_mm));
    }

    double length() const { return norm(p1 - p0); }
    Vec3 direction() const { return normalized(p1 - p0); }
    double pixel_length() const { return norm(pixel_p1 - pixel_p0); }
};

/// Segments extracted from one image; pixel footprints are guaranteed to lie
/// inside [0, width) x [0, height).
struct EdgeSegmentSet {
    std::vector<Segment3D> segments;
    int width = 0, height = 0;

    EdgeSegmentSet() = default;
    EdgeSegmentSet(std::vector<Segment3D> segs, int w, int h)
        : segments(std::move(segs)), width(w), height(h) {
        for (const auto& s : segments) {
            if (!footprint_ok(s.pixel_p0) || !footprint_ok(s.pixel_p1))
                throw InvalidGeometry("segment pixel footprint outside image bounds");
        }
    }

    size_t size() const { return segments.size(); }

private:
    bool footprint_ok(Vec2 p) const {
        return p.x >= 0.0 && p.x <= width - 1.0 && p.y >= 0.0 && p.y <= height - 1.0;
    }
};

} // namespace tanglemap
