#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tanglemap/writhe.hpp"

using namespace tanglemap;

namespace {

Segment3D seg(Vec3 a, Vec3 b) { return Segment3D(a, b, {0, 0}, {1, 1}); }

Segment3D seg_px(Vec3 a, Vec3 b, Vec2 pa, Vec2 pb) { return Segment3D(a, b, pa, pb); }

} // namespace

TEST_CASE("writhe matrix of coplanar segments is all zero") {
    const std::vector<Segment3D> segs{seg({0, 0, 0}, {1000, 0, 0}),
                                      seg({0, 1000, 0}, {1000, 1000, 0})};
    const WritheMatrix m = writhe_matrix(segs);
    REQUIRE(m.size() == 2);
    m.for_each_upper([](int, int, double v) { REQUIRE(v == 0.0); });
    REQUIRE(writhe(m) == 0.0);
    REQUIRE(density(m) == 0.0);
}

TEST_CASE("writhe matrix is strictly upper-triangular and non-negative") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1000, 1000);
    std::vector<Segment3D> segs;
    while (segs.size() < 8) {
        const Vec3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
        if (norm(b - a) > 100.0) segs.push_back(seg(a, b));
    }
    const WritheMatrix m = writhe_matrix(segs);
    int entries = 0;
    for (int i = 0; i < m.size(); i++)
        for (int j = 0; j < m.size(); j++) {
            if (i >= j) REQUIRE(m.at(i, j) == 0.0);
            if (i < j) {
                REQUIRE(m.at(i, j) >= 0.0);
                entries++;
            }
        }
    REQUIRE(entries == 8 * 7 / 2);
}

TEST_CASE("a single interacting pair produces a single matrix entry") {
    // pair (0,1) crosses in 3D; segment 2 is parallel to 0 and lies in
    // segment 1's plane, so both of its pairs vanish exactly
    const std::vector<Segment3D> segs{
        seg({-1000, 0, 0}, {1000, 0, 0}),       // x axis, z = 0
        seg({0, -1000, 500}, {0, 1000, 500}),   // crossing above
        seg({0, 2000, 500}, {1000, 2000, 500}), // parallel to 0, coplanar with 1
    };
    const WritheMatrix m = writhe_matrix(segs);
    const double expected = std::fabs(gli_segments(segs[0], segs[1]));
    REQUIRE(expected > 0.0);
    REQUIRE(m.at(0, 1) == expected);
    REQUIRE(m.at(0, 2) == 0.0);
    REQUIRE(m.at(1, 2) == 0.0);
    REQUIRE(writhe(m) == Catch::Approx(expected / 3.0));
}

TEST_CASE("near-singular pairs saturate instead of failing") {
    const std::vector<Segment3D> segs{seg({-1000, 0, 0}, {1000, 0, 0}),
                                      seg({0, -1000, 1e-12}, {0, 1000, 1e-12})};
    const WritheMatrix m = writhe_matrix(segs);
    REQUIRE(m.at(0, 1) == kGliSaturation);
}

TEST_CASE("writhe follows the matrix sum over the segment count") {
    WritheMatrix m(2);
    REQUIRE(writhe(m) == 0.0);
    m.set(0, 1, 0.3);
    REQUIRE(writhe(m) == Catch::Approx(0.15));

    WritheMatrix big(6);
    big.set(0, 1, 0.1);
    big.set(2, 4, 0.2);
    big.set(3, 5, 0.4);
    REQUIRE(writhe(big) == Catch::Approx(0.7 / 6.0));
}

TEST_CASE("writhe requires at least two segments") {
    const std::vector<Segment3D> one{seg({0, 0, 0}, {1000, 0, 0})};
    REQUIRE_THROWS_AS(writhe_matrix(one), TooFewSegments);
}

TEST_CASE("density follows the above-mean ratio over non-zero entries") {
    SECTION("all-zero matrix") {
        WritheMatrix m(3);
        REQUIRE(density(m) == 0.0);
    }
    SECTION("uniform entries have nothing above the mean") {
        WritheMatrix m(4);
        m.set(0, 1, 1.0);
        m.set(0, 2, 1.0);
        m.set(1, 3, 1.0);
        m.set(2, 3, 1.0);
        REQUIRE(density(m) == 0.0);
    }
    SECTION("one dominant entry among four") {
        WritheMatrix m(4);
        m.set(0, 1, 0.1);
        m.set(0, 2, 0.1);
        m.set(1, 3, 0.1);
        m.set(2, 3, 0.9); // mean 0.3, one entry above
        REQUIRE(density(m) == Catch::Approx(0.25));
    }
}

TEST_CASE("density stays within the unit interval") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (int trial = 0; trial < 50; trial++) {
        WritheMatrix m(6);
        for (int i = 0; i < 6; i++)
            for (int j = i + 1; j < 6; j++)
                if (u(rng) < 0.35) m.set(i, j, u(rng));
        const double d = density(m);
        REQUIRE(d >= 0.0);
        REQUIRE(d <= 1.0);
    }
}

TEST_CASE("center finds the mass centroid snapped to support") {
    SECTION("single entry") {
        WritheMatrix m(6);
        m.set(2, 5, 0.7);
        REQUIRE(center(m) == std::pair<int, int>{2, 5});
    }
    SECTION("symmetric tie snaps toward the smaller column") {
        WritheMatrix m(6);
        m.set(1, 3, 0.5);
        m.set(1, 5, 0.5); // centroid (1,4) is equidistant
        REQUIRE(center(m) == std::pair<int, int>{1, 3});
    }
    SECTION("mass-weighted centroid") {
        WritheMatrix m(6);
        m.set(0, 1, 0.3);
        m.set(4, 5, 0.1); // centroid (1.0, 2.0) is nearest to (0,1)
        REQUIRE(center(m) == std::pair<int, int>{0, 1});
    }
    SECTION("all-zero matrix is an error") {
        WritheMatrix m(4);
        REQUIRE_THROWS_AS(center(m), AllZeroMatrix);
    }
}

TEST_CASE("matrix sum never decreases when a pair is added") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (int trial = 0; trial < 100; trial++) {
        WritheMatrix m(8);
        for (int i = 0; i < 8; i++)
            for (int j = i + 1; j < 8; j++)
                if (u(rng) < 0.3) m.set(i, j, u(rng));
        const double before = m.sum();
        // add one more non-zero pair on a free slot
        [&] {
            for (int i = 0; i < 8; i++)
                for (int j = i + 1; j < 8; j++)
                    if (m.at(i, j) == 0.0) {
                        m.set(i, j, u(rng) + 1e-6);
                        return;
                    }
        }();
        REQUIRE(m.sum() >= before);
    }
}

TEST_CASE("center mask rasterizes both center segments") {
    const std::vector<Segment3D> segs{
        seg_px({0, 0, 1000}, {100, 0, 1000}, {10, 10}, {20, 10}),
        seg_px({0, 0, 1000}, {0, 100, 1000}, {40, 40}, {40, 50}),
    };

    SECTION("dilation 0 marks exactly the raster lines") {
        const CenterMask mask = center_mask(segs, {0, 1}, 64, 64, 0);
        int count = 0;
        for (int y = 0; y < 64; y++)
            for (int x = 0; x < 64; x++) count += mask.at(x, y);
        REQUIRE(count == 11 + 11);
        for (int x = 10; x <= 20; x++) REQUIRE(mask.at(x, 10) == 1);
        for (int y = 40; y <= 50; y++) REQUIRE(mask.at(40, y) == 1);
    }
    SECTION("mask dimensions equal the image dimensions") {
        const CenterMask mask = center_mask(segs, {0, 1}, 123, 77, 8);
        REQUIRE(mask.width() == 123);
        REQUIRE(mask.height() == 77);
    }
    SECTION("dilation grows the footprint") {
        const CenterMask thin = center_mask(segs, {0, 1}, 64, 64, 0);
        const CenterMask fat = center_mask(segs, {0, 1}, 64, 64, 3);
        int thin_count = 0, fat_count = 0;
        for (int y = 0; y < 64; y++)
            for (int x = 0; x < 64; x++) {
                thin_count += thin.at(x, y);
                fat_count += fat.at(x, y);
                if (thin.at(x, y)) REQUIRE(fat.at(x, y) == 1);
            }
        REQUIRE(fat_count > thin_count);
    }
}
