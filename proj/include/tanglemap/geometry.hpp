#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace tanglemap {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(Vec3 a, double s) { return s * a; }
inline Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
inline Vec3& operator+=(Vec3& a, Vec3 b) { a = a + b; return a; }
inline Vec3& operator-=(Vec3& a, Vec3 b) { a = a - b; return a; }
inline bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm_sq(Vec3 a) { return dot(a, a); }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) { return a / norm(a); }

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

struct Vec2i {
    int x = 0, y = 0;
    friend bool operator==(Vec2i a, Vec2i b) { return a.x == b.x && a.y == b.y; }
};

// Axis-aligned pixel rectangle, half-open is not used: [x, x+w) x [y, y+h).
struct Rect {
    int x = 0, y = 0, w = 0, h = 0;

    bool contains(int px, int py) const {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
    long long area() const { return static_cast<long long>(w) * h; }

    long long intersection_area(const Rect& o) const {
        int x0 = std::max(x, o.x), y0 = std::max(y, o.y);
        int x1 = std::min(x + w, o.x + o.w), y1 = std::min(y + h, o.y + o.h);
        if (x1 <= x0 || y1 <= y0) return 0;
        return static_cast<long long>(x1 - x0) * (y1 - y0);
    }
};

// Row-major 3x3 rotation plus translation.
struct RigidTransform {
    std::array<double, 9> r = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    Vec3 t;

    Vec3 apply(Vec3 p) const {
        return {r[0] * p.x + r[1] * p.y + r[2] * p.z + t.x,
                r[3] * p.x + r[4] * p.y + r[5] * p.z + t.y,
                r[6] * p.x + r[7] * p.y + r[8] * p.z + t.z};
    }

    Vec3 rotate(Vec3 p) const {
        return {r[0] * p.x + r[1] * p.y + r[2] * p.z,
                r[3] * p.x + r[4] * p.y + r[5] * p.z,
                r[6] * p.x + r[7] * p.y + r[8] * p.z};
    }

    // this followed by other: (other * this).apply(p) == other.apply(this->apply(p))
    RigidTransform then(const RigidTransform& o) const {
        RigidTransform out;
        for (int i = 0; i < 3; i++)
            for (int j = 0; j < 3; j++) {
                double s = 0;
                for (int k = 0; k < 3; k++) s += o.r[3 * i + k] * r[3 * k + j];
                out.r[3 * i + j] = s;
            }
        out.t = o.apply(t);
        return out;
    }

    static RigidTransform translation(Vec3 t) {
        RigidTransform m;
        m.t = t;
        return m;
    }

    static RigidTransform rotation_axis_angle(Vec3 axis, double angle_rad) {
        Vec3 u = normalized(axis);
        double c = std::cos(angle_rad), s = std::sin(angle_rad), ic = 1.0 - c;
        RigidTransform m;
        m.r = {c + u.x * u.x * ic,       u.x * u.y * ic - u.z * s, u.x * u.z * ic + u.y * s,
               u.y * u.x * ic + u.z * s, c + u.y * u.y * ic,       u.y * u.z * ic - u.x * s,
               u.z * u.x * ic - u.y * s, u.z * u.y * ic + u.x * s, c + u.z * u.z * ic};
        return m;
    }

    static RigidTransform from_quaternion(double w, double x, double y, double z) {
        double n = std::sqrt(w * w + x * x + y * y + z * z);
        w /= n; x /= n; y /= n; z /= n;
        RigidTransform m;
        m.r = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
               2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
               2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
        return m;
    }
};

// Closest-distance between two 3D segments (clamped closest-point method).
inline double segment_distance(Vec3 p1, Vec3 q1, Vec3 p2, Vec3 q2) {
    const Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    const double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
    const double c = dot(d1, r), b = dot(d1, d2);
    double s, t;
    if (a <= 0.0 && e <= 0.0) return norm(r);
    if (a <= 0.0) {
        s = 0.0;
        t = std::clamp(f / e, 0.0, 1.0);
    } else if (e <= 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
    } else {
        const double denom = a * e - b * b;
        s = denom != 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
        t = b * s + f;
        if (t < 0.0) {
            t = 0.0;
            s = std::clamp(-c / a, 0.0, 1.0);
        } else if (t > e) {
            t = 1.0;
            s = std::clamp((b - c) / a, 0.0, 1.0);
        } else {
            t /= e;
        }
    }
    return norm((p1 + s * d1) - (p2 + t * d2));
}

inline double point_segment_distance_2d(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

// Does 2D segment (a,b) touch axis-aligned rect (pixel-center coordinates)?
inline bool segment_intersects_rect(Vec2 a, Vec2 b, const Rect& rc) {
    const double x0 = rc.x, y0 = rc.y;
    const double x1 = rc.x + rc.w - 1.0, y1 = rc.y + rc.h - 1.0;
    // Liang-Barsky clip of the parametric segment against the rect slab
    double t0 = 0.0, t1 = 1.0;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - x0, x1 - a.x, a.y - y0, y1 - a.y};
    for (int i = 0; i < 4; i++) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
        } else {
            const double r = q[i] / p[i];
            if (p[i] < 0.0) {
                if (r > t1) return false;
                if (r > t0) t0 = r;
            } else {
                if (r < t0) return false;
                if (r < t1) t1 = r;
            }
        }
    }
    return true;
}

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

} // namespace tanglemap
