#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tanglemap/gli.hpp"
#include "tanglemap/grid.hpp"
#include "tanglemap/raster.hpp"
#include "tanglemap/segment.hpp"

namespace tanglemap {

// A single segment pair can contribute at most half a turn.
constexpr double kGliSaturation = 0.5;

/// Strictly upper-triangular store of pairwise |GLI| values.
class WritheMatrix {
public:
    WritheMatrix() = default;
    explicit WritheMatrix(int n) : n_(n), v_(static_cast<size_t>(n) * n, 0.0) {}

    int size() const { return n_; }

    double at(int i, int j) const { return v_[static_cast<size_t>(i) * n_ + j]; }

    void set(int i, int j, double value) {
        if (i >= j) throw InvalidParams("writhe matrix is strictly upper-triangular");
        if (value < 0.0) throw InvalidParams("writhe matrix entries are non-negative");
        v_[static_cast<size_t>(i) * n_ + j] = value;
    }

    /// Sum over the stored (upper-triangular) entries.
    double sum() const {
        double s = 0.0;
        for (int i = 0; i < n_; i++)
            for (int j = i + 1; j < n_; j++) s += at(i, j);
        return s;
    }

    template <typename F>
    void for_each_upper(F&& f) const {
        for (int i = 0; i < n_; i++)
            for (int j = i + 1; j < n_; j++) f(i, j, at(i, j));
    }

private:
    int n_ = 0;
    std::vector<double> v_;
};

/// (w, c, d) attributes of a scene; center is absent when no segment pair
/// interacts (all-zero matrix or fewer than two segments).
struct TopologyCoordinate {
    double writhe = 0.0;
    double density = 0.0;
    std::optional<std::pair<int, int>> center;
};

using CenterMask = MaskGrid;

/// Pairwise |GLI| matrix over the segment list. Pairs closer than
/// eps_intersect are scored with the saturation value: near-contact is the
/// strongest entanglement evidence, not an error.
inline WritheMatrix writhe_matrix(std::span<const Segment3D> segments,
                                  double eps_intersect_mm = kEpsIntersectMm) {
    const int n = static_cast<int>(segments.size());
    if (n < 2) throw TooFewSegments("writhe matrix needs at least 2 segments");
    WritheMatrix m(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            double v;
            try {
                v = std::fabs(gli_segments(segments[i], segments[j], eps_intersect_mm));
            } catch (const NearSingular&) {
                v = kGliSaturation;
            }
            m.set(i, j, v);
        }
    }
    return m;
}

/// Mean total |GLI| per segment.
inline double writhe(const WritheMatrix& m) {
    if (m.size() == 0) return 0.0;
    return m.sum() / m.size();
}

/// Fraction of the non-zero entries lying strictly above their mean; 0 for an
/// all-zero matrix.
inline double density(const WritheMatrix& m) {
    double sum = 0.0;
    int count = 0;
    m.for_each_upper([&](int, int, double v) {
        if (v != 0.0) {
            sum += v;
            count++;
        }
    });
    if (count == 0) return 0.0;
    const double mean = sum / count;
    int above = 0;
    m.for_each_upper([&](int, int, double v) {
        if (v != 0.0 && v > mean) above++;
    });
    return static_cast<double>(above) / count;
}

/// Index pair at the mass centroid of the matrix, snapped to the nearest
/// non-zero entry (ties toward smaller i, then smaller j) so the result
/// always names a real interacting pair.
inline std::pair<int, int> center(const WritheMatrix& m) {
    double total = 0.0, ci = 0.0, cj = 0.0;
    m.for_each_upper([&](int i, int j, double v) {
        total += v;
        ci += v * i;
        cj += v * j;
    });
    if (total == 0.0) throw AllZeroMatrix("center of an all-zero writhe matrix");
    ci /= total;
    cj /= total;

    std::pair<int, int> best{-1, -1};
    double best_d2 = 0.0;
    m.for_each_upper([&](int i, int j, double v) {
        if (v == 0.0) return;
        const double d2 = (i - ci) * (i - ci) + (j - cj) * (j - cj);
        if (best.first < 0 || d2 < best_d2) {
            best = {i, j};
            best_d2 = d2;
        }
        // ties resolved by the scan order: smaller i first, then smaller j
    });
    return best;
}

/// Binary image covering both center segments' pixel footprints, dilated by
/// dilation_px (Chebyshev ball).
inline CenterMask center_mask(std::span<const Segment3D> segments, std::pair<int, int> c,
                              int width, int height, int dilation_px = 8) {
    if (width <= 0 || height <= 0) throw InvalidParams("center_mask needs positive dims");
    if (c.first < 0 || c.second >= static_cast<int>(segments.size()) || c.first >= c.second)
        throw InvalidParams("center indices out of range");
    CenterMask mask(width, height, 0);
    for (int idx : {c.first, c.second}) {
        const Segment3D& s = segments[idx];
        draw_line(mask, {static_cast<int>(std::lround(s.pixel_p0.x)),
                         static_cast<int>(std::lround(s.pixel_p0.y))},
                  {static_cast<int>(std::lround(s.pixel_p1.x)),
                   static_cast<int>(std::lround(s.pixel_p1.y))},
                  uint8_t{1});
    }
    if (dilation_px > 0) mask = dilate(mask, dilation_px);
    return mask;
}

} // namespace tanglemap
