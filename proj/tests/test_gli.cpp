#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tanglemap/gli.hpp"
#include "tanglemap/segment.hpp"

using namespace tanglemap;

namespace {

Segment3D seg(Vec3 a, Vec3 b) { return Segment3D(a, b, {0, 0}, {1, 1}); }

Vec3 random_point(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

// random well-separated pair; quadrature at N=4096 resolves these to ~1e-8
std::pair<Segment3D, Segment3D> random_pair(std::mt19937_64& rng) {
    for (;;) {
        const Vec3 a0 = random_point(rng), a1 = random_point(rng);
        const Vec3 b0 = random_point(rng), b1 = random_point(rng);
        if (norm(a1 - a0) < 0.3 || norm(b1 - b0) < 0.3) continue;
        if (segment_distance(a0, a1, b0, b1) < 0.15) continue;
        return {Segment3D(a0, a1, {0, 0}, {1, 1}, 1e-6), Segment3D(b0, b1, {0, 0}, {1, 1}, 1e-6)};
    }
}

} // namespace

TEST_CASE("coplanar segments have exactly zero GLI") {
    const auto a = seg({0, 0, 0}, {1000, 0, 0});
    const auto b = seg({0, 1000, 0}, {1000, 1000, 0});
    REQUIRE(gli_segments(a, b) == 0.0);
    REQUIRE(gli_quadrature(a, b, 64) == 0.0);
}

TEST_CASE("GLI is symmetric under argument swap") {
    const auto a = seg({-1000, 0, 0}, {1000, 0, 0});
    const auto b = seg({0, -1000, 1000}, {0, 1000, 1000});
    REQUIRE(gli_segments(a, b) == gli_segments(b, a));

    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; i++) {
        const auto [p, q] = random_pair(rng);
        REQUIRE(gli_segments(p, q) == gli_segments(q, p));
    }
}

TEST_CASE("skew crossing pair agrees with the quadrature oracle") {
    const auto a = seg({-1000, 0, 0}, {1000, 0, 0});
    const auto b = seg({0, -1000, 1000}, {0, 1000, 1000});
    const double closed = gli_segments(a, b);
    const double oracle = gli_quadrature(a, b, 4096);
    REQUIRE(std::fabs(closed - oracle) < 1e-6);
    REQUIRE(std::fabs(closed) <= 0.5);
    // this symmetric crossing resolves in closed form to -1/6
    REQUIRE(closed == Catch::Approx(-1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("closed form matches quadrature on random pairs") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 25; i++) {
        const auto [a, b] = random_pair(rng);
        const double closed = gli_segments(a, b);
        const double oracle = gli_quadrature(a, b, 4096);
        INFO("pair " << i);
        REQUIRE(std::fabs(closed - oracle) < 1e-6);
        REQUIRE(std::fabs(closed) <= 0.5);
    }
}

TEST_CASE("quadrature refines under subdivision (Richardson check)") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 10; i++) {
        const auto [a, b] = random_pair(rng);
        const double exact = gli_segments(a, b);
        const double coarse = gli_quadrature(a, b, 64);
        const double fine = gli_quadrature(a, b, 128);
        REQUIRE(std::fabs(fine - exact) <= std::fabs(coarse - exact) + 1e-12);
    }
}

TEST_CASE("Hopf-linked rectangles sum to linking number one") {
    // square loop in the z=0 plane around the origin; second loop in the
    // y=0 plane threading it
    const Vec3 A[4] = {{-1000, -1000, 0}, {1000, -1000, 0}, {1000, 1000, 0}, {-1000, 1000, 0}};
    const Vec3 B[4] = {{0, 0, -1000}, {2000, 0, -1000}, {2000, 0, 1000}, {0, 0, 1000}};

    double quad_sum = 0.0, closed_sum = 0.0;
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 4; j++) {
            const auto sa = seg(A[i], A[(i + 1) % 4]);
            const auto sb = seg(B[j], B[(j + 1) % 4]);
            quad_sum += gli_quadrature(sa, sb, 512);
            closed_sum += gli_segments(sa, sb);
        }
    REQUIRE(std::fabs(std::fabs(quad_sum) - 1.0) < 1e-3);
    REQUIRE(std::fabs(std::fabs(closed_sum) - 1.0) < 1e-9);

    const std::vector<Vec3> loop_a(A, A + 4), loop_b(B, B + 4);
    REQUIRE(std::fabs(std::fabs(polyline_linking_sum(loop_a, loop_b)) - 1.0) < 1e-9);
}

TEST_CASE("separated loops sum to linking number zero") {
    const std::vector<Vec3> a{{-1000, -1000, 0}, {1000, -1000, 0}, {1000, 1000, 0}, {-1000, 1000, 0}};
    std::vector<Vec3> b;
    for (const Vec3& p : a) b.push_back(p + Vec3{5000, 0, 100});
    REQUIRE(std::fabs(polyline_linking_sum(a, b)) < 1e-3);
}

TEST_CASE("rigid motions leave GLI unchanged") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 50; i++) {
        const auto [a, b] = random_pair(rng);
        const double base = gli_segments(a, b);
        RigidTransform t = RigidTransform::rotation_axis_angle(
            {u(rng) + 1.5, u(rng), u(rng)}, u(rng) * 3.0);
        t.t = {u(rng) * 10, u(rng) * 10, u(rng) * 10};
        const auto ta = Segment3D(t.apply(a.p0), t.apply(a.p1), {0, 0}, {1, 1}, 1e-6);
        const auto tb = Segment3D(t.apply(b.p0), t.apply(b.p1), {0, 0}, {1, 1}, 1e-6);
        REQUIRE(std::fabs(gli_segments(ta, tb) - base) < 1e-9);
    }
}

TEST_CASE("uniform scaling leaves GLI unchanged") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> s(0.1, 50.0);
    for (int i = 0; i < 50; i++) {
        const auto [a, b] = random_pair(rng);
        const double base = gli_segments(a, b);
        const double k = s(rng);
        const auto sa = Segment3D(k * a.p0, k * a.p1, {0, 0}, {1, 1}, 1e-9);
        const auto sb = Segment3D(k * b.p0, k * b.p1, {0, 0}, {1, 1}, 1e-9);
        REQUIRE(std::fabs(gli_segments(sa, sb) - base) < 1e-9);
    }
}

TEST_CASE("segments sharing an endpoint integrate to zero") {
    const auto a = seg({0, 0, 0}, {1000, 0, 0});
    const auto b = seg({1000, 0, 0}, {1000, 1000, 500});
    REQUIRE(gli_segments(a, b) == 0.0);
}

TEST_CASE("degenerate and near-singular inputs are rejected") {
    REQUIRE_THROWS_AS(Segment3D({0, 0, 0}, {0.5, 0, 0}, {0, 0}, {1, 1}), DegenerateSegment);

    // crossing pair passing through contact
    const auto a = seg({-1000, 0, 0}, {1000, 0, 0});
    const auto b = seg({0, -1000, 1e-12}, {0, 1000, 1e-12});
    REQUIRE_THROWS_AS(gli_segments(a, b), NearSingular);
    REQUIRE_THROWS_AS(gli_quadrature(a, b, 64), NearSingular);
}

TEST_CASE("quadrature rejects too few subdivisions") {
    const auto a = seg({-1000, 0, 0}, {1000, 0, 0});
    const auto b = seg({0, -1000, 1000}, {0, 1000, 1000});
    REQUIRE_THROWS_AS(gli_quadrature(a, b, 1), InvalidParams);
}
