#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "tanglemap/errors.hpp"
#include "tanglemap/geometry.hpp"
#include "tanglemap/segment.hpp"

namespace tanglemap {

// Gaussian link integral between two straight segments.
//
// The integrand of the double line integral has constant sign over the
// parameter rectangle: with directions u, v and offset r the numerator is
// (u x v) . r for every parameter pair, so the pair integral vanishes exactly
// when that triple product is zero (parallel, coplanar, or sharing an
// endpoint).  Otherwise the closed form evaluates the solid angle of the
// spherical quadrilateral spanned by the four endpoint directions
// (Klenin/Langowski style), which bounds a single pair's |GLI| by 1/2.

namespace detail {

inline double asin_clamped(double v) { return std::asin(std::clamp(v, -1.0, 1.0)); }

inline bool segment_key_less(Vec3 a0, Vec3 a1, Vec3 b0, Vec3 b1) {
    const double ka[6] = {a0.x, a0.y, a0.z, a1.x, a1.y, a1.z};
    const double kb[6] = {b0.x, b0.y, b0.z, b1.x, b1.y, b1.z};
    for (int i = 0; i < 6; i++)
        if (ka[i] != kb[i]) return ka[i] < kb[i];
    return false;
}

} // namespace detail

/// Signed GLI of two segments given by endpoints. Throws NearSingular when
/// the segments pass closer than eps_intersect_mm (caller decides policy).
inline double gli_segments_points(Vec3 a0, Vec3 a1, Vec3 b0, Vec3 b1,
                                  double eps_intersect_mm = kEpsIntersectMm) {
    // the integral is symmetric in its arguments; fixing a canonical order
    // makes the floating-point result bit-identical under swap as well
    if (detail::segment_key_less(b0, b1, a0, a1)) {
        std::swap(a0, b0);
        std::swap(a1, b1);
    }
    const Vec3 r12 = a1 - a0;
    const Vec3 r34 = b1 - b0;
    const Vec3 r13 = b0 - a0;

    const double tri = dot(cross(r34, r12), r13);
    if (tri == 0.0) return 0.0; // integrand identically zero

    if (segment_distance(a0, a1, b0, b1) <= eps_intersect_mm)
        throw NearSingular("segments pass within eps_intersect");

    const Vec3 r14 = b1 - a0;
    const Vec3 r23 = b0 - a1;
    const Vec3 r24 = b1 - a1;

    // tri != 0 guarantees none of the endpoint triples is collinear, so all
    // four normals are well defined.
    const Vec3 n1 = normalized(cross(r13, r14));
    const Vec3 n2 = normalized(cross(r14, r24));
    const Vec3 n3 = normalized(cross(r24, r23));
    const Vec3 n4 = normalized(cross(r23, r13));

    const double omega = detail::asin_clamped(dot(n1, n2)) + detail::asin_clamped(dot(n2, n3)) +
                         detail::asin_clamped(dot(n3, n4)) + detail::asin_clamped(dot(n4, n1));

    return omega / (4.0 * kPi) * (tri > 0.0 ? 1.0 : -1.0);
}

inline double gli_segments(const Segment3D& a, const Segment3D& b,
                           double eps_intersect_mm = kEpsIntersectMm) {
    return gli_segments_points(a.p0, a.p1, b.p0, b.p1, eps_intersect_mm);
}

/// Midpoint-rule discretization of the GLI double integral with the given
/// number of subdivisions per segment. Slow; used as an independent check of
/// gli_segments.
inline double gli_quadrature_points(Vec3 a0, Vec3 a1, Vec3 b0, Vec3 b1, int subdivisions,
                                    double eps_intersect_mm = kEpsIntersectMm) {
    if (subdivisions < 2) throw InvalidParams("gli_quadrature needs >= 2 subdivisions");
    if (!(norm(a1 - a0) > 0.0) || !(norm(b1 - b0) > 0.0))
        throw DegenerateSegment("zero-length segment in gli_quadrature");
    if (segment_distance(a0, a1, b0, b1) <= eps_intersect_mm)
        throw NearSingular("segments pass within eps_intersect");

    const int n = subdivisions;
    const Vec3 c = cross(a1 - a0, b1 - b0);
    if (c == Vec3{}) return 0.0;

    std::vector<double> bx(n), by(n), bz(n);
    const Vec3 db = (b1 - b0) / n;
    for (int j = 0; j < n; j++) {
        const Vec3 q = b0 + (j + 0.5) * db;
        bx[j] = q.x;
        by[j] = q.y;
        bz[j] = q.z;
    }

    const Vec3 da = (a1 - a0) / n;
    double total = 0.0;
    for (int i = 0; i < n; i++) {
        const Vec3 p = a0 + (i + 0.5) * da;
        const double px = p.x, py = p.y, pz = p.z;
        double s = 0.0;
#pragma omp simd reduction(+ : s)
        for (int j = 0; j < n; j++) {
            const double wx = px - bx[j];
            const double wy = py - by[j];
            const double wz = pz - bz[j];
            const double d2 = wx * wx + wy * wy + wz * wz;
            s += (c.x * wx + c.y * wy + c.z * wz) / (d2 * std::sqrt(d2));
        }
        total += s;
    }
    return total / (4.0 * kPi) / (static_cast<double>(n) * n);
}

inline double gli_quadrature(const Segment3D& a, const Segment3D& b, int subdivisions,
                             double eps_intersect_mm = kEpsIntersectMm) {
    return gli_quadrature_points(a.p0, a.p1, b.p0, b.p1, subdivisions, eps_intersect_mm);
}

namespace detail {

// Vertices of a loop with any duplicated closing vertex dropped; edges run
// v[i] -> v[(i+1) % n].
inline std::vector<Vec3> loop_vertices(std::span<const Vec3> loop) {
    std::vector<Vec3> v(loop.begin(), loop.end());
    while (v.size() > 1 && norm(v.front() - v.back()) == 0.0) v.pop_back();
    return v;
}

} // namespace detail

/// Signed linking number estimate of two closed polylines (closure edge
/// last->first implied): sum of pairwise segment GLIs. Converges to an
/// integer for non-touching loops.
inline double polyline_linking_sum(std::span<const Vec3> loop_a, std::span<const Vec3> loop_b,
                                   double eps_intersect_mm = kEpsIntersectMm) {
    const std::vector<Vec3> a = detail::loop_vertices(loop_a);
    const std::vector<Vec3> b = detail::loop_vertices(loop_b);
    if (a.size() < 3 || b.size() < 3)
        throw InvalidParams("linking needs closed loops of >= 3 vertices");
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); i++) {
        const Vec3 a0 = a[i], a1 = a[(i + 1) % a.size()];
        if (norm(a1 - a0) == 0.0) continue;
        for (size_t j = 0; j < b.size(); j++) {
            const Vec3 b0 = b[j], b1 = b[(j + 1) % b.size()];
            if (norm(b1 - b0) == 0.0) continue;
            sum += gli_segments_points(a0, a1, b0, b1, eps_intersect_mm);
        }
    }
    return sum;
}

} // namespace tanglemap
