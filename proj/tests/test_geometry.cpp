#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "stripflow/fixtures.hpp"
#include "stripflow/geometry.hpp"

using namespace stripflow;

TEST_CASE("area, perimeter, moment on a rectangle") {
    Polygon r{{1.0, 2.0}, {3.0, 2.0}, {3.0, 5.0}, {1.0, 5.0}};
    CHECK(signed_area(r) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(perimeter(r) == doctest::Approx(10.0).epsilon(1e-15));
    // int x2 over the rectangle: area * centroid height = 6 * 3.5
    CHECK(moment_y(r) == doctest::Approx(21.0).epsilon(1e-14));
}

TEST_CASE("triangulation covers the polygon area") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
        Polygon p = fixtures::random_star_polygon(rng);
        const double a = std::abs(signed_area(p));
        double s = 0.0;
        for (const Triangle& t : triangulate(p)) s += 0.5 * std::abs(cross(t.b - t.a, t.c - t.a));
        CHECK(s == doctest::Approx(a).epsilon(1e-12));
    }
}

TEST_CASE("point in polygon") {
    Polygon p{{0.0, 0.0}, {2.0, 0.0}, {2.0, 1.0}, {0.0, 1.0}};
    CHECK(point_in_polygon({1.0, 0.5}, p));
    CHECK(!point_in_polygon({3.0, 0.5}, p));
}

TEST_CASE("half-plane clip splits and conserves area") {
    // U-shape cut by a horizontal line -> two pieces
    Polygon u{{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}};
    // keep x2 <= 0.5: single bottom slab
    auto low = clip_halfplane(u, {0.0, 1.0}, 0.5);
    double a = 0.0;
    for (const auto& q : low) a += std::abs(signed_area(q));
    CHECK(a == doctest::Approx(1.5).epsilon(1e-12));

    // keep x2 >= 2 -> the two prongs
    auto high = clip_halfplane(u, {0.0, -1.0}, -2.0);
    CHECK(high.size() == 2);
    double b = 0.0;
    for (const auto& q : high) b += std::abs(signed_area(q));
    CHECK(b == doctest::Approx(2.0).epsilon(1e-12));

    // fully inside
    auto all = clip_halfplane(u, {0.0, 1.0}, 10.0);
    double c = 0.0;
    for (const auto& q : all) c += std::abs(signed_area(q));
    CHECK(c == doctest::Approx(std::abs(signed_area(u))).epsilon(1e-12));

    // fully outside
    CHECK(clip_halfplane(u, {0.0, 1.0}, -1.0).empty());
}

TEST_CASE("random clip conserves split areas") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> cd(-0.8, 0.8);
    for (int k = 0; k < 100; ++k) {
        Polygon p = fixtures::random_star_polygon(rng);
        const double c = cd(rng);
        const double a = std::abs(signed_area(p));
        double lo = 0.0, hi = 0.0;
        for (const auto& q : clip_halfplane(p, {0.0, 1.0}, c)) lo += std::abs(signed_area(q));
        for (const auto& q : clip_halfplane(p, {0.0, -1.0}, -c)) hi += std::abs(signed_area(q));
        CHECK(lo + hi == doctest::Approx(a).epsilon(1e-10));
    }
}
