#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tanglemap/camera.hpp"

using namespace tanglemap;

TEST_CASE("principal point backprojects onto the optical axis") {
    const Intrinsics k{1000.0, 1000.0, 320.0, 240.0};
    const Vec3 p = backproject({320.0, 240.0}, 1000.0, k);
    REQUIRE(p.x == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(p.y == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(p.z == 1000.0);
}

TEST_CASE("one focal length to the right maps to unit tangent") {
    const Intrinsics k{1000.0, 800.0, 320.0, 240.0};
    const Vec3 p = backproject({320.0 + k.fx, 240.0}, 1000.0, k);
    REQUIRE(p.x == Catch::Approx(1000.0));
    REQUIRE(p.y == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("project inverts backproject over random pixels") {
    const Intrinsics k{914.3, 902.7, 255.5, 255.5};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> px(0.0, 511.0), depth(100.0, 1999.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; i++) {
        const Vec2 p{px(rng), px(rng)};
        const double z = depth(rng);
        const Vec2 q = project(backproject(p, z, k), k);
        worst = std::max({worst, std::fabs(q.x - p.x), std::fabs(q.y - p.y)});
    }
    REQUIRE(worst < 1e-6);
}

TEST_CASE("non-positive depth is rejected") {
    const Intrinsics k{1000.0, 1000.0, 320.0, 240.0};
    REQUIRE_THROWS_AS(backproject({0, 0}, 0.0, k), NonPositiveDepth);
    REQUIRE_THROWS_AS(backproject({0, 0}, -5.0, k), NonPositiveDepth);
    REQUIRE_THROWS_AS(project({0, 0, 0}, k), NonPositiveDepth);
}
