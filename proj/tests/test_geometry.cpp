#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "scatter/geometry.hpp"

using namespace scatter;
using namespace scatter::geometry;

namespace {

const ShapeKind kAllKinds[] = {ShapeKind::Circle,        ShapeKind::Apple,
                               ShapeKind::Kite,          ShapeKind::Peanut,
                               ShapeKind::RoundedSquare, ShapeKind::RoundedTriangle};

double arc_length(const ParametricCurve& c, int nodes) {
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) sum += c.jacobian(kTwoPi * i / nodes);
    return sum * kTwoPi / nodes;
}

}  // namespace

TEST_CASE("catalogue points at t = 0") {
    auto circle = make_shape(ShapeKind::Circle, {0, 0}, 1.0);
    CHECK((circle.point(0.0) - Vec2(1, 0)).norm() < 1e-15);

    auto kite = make_shape(ShapeKind::Kite, {0, 0});
    CHECK((kite.point(0.0) - Vec2(1, 0)).norm() < 1e-15);

    auto apple = make_shape(ShapeKind::Apple, {0, 0});
    CHECK((apple.point(0.0) - Vec2(0.9 / 1.7, 0)).norm() < 1e-15);
}

TEST_CASE("closure and periodicity") {
    for (ShapeKind kind : kAllKinds) {
        auto c = make_shape(kind, {0.3, -0.4}, 2.0);
        CHECK((c.point(0.0) - c.point(kTwoPi - 1e-10)).norm() < 1e-8);
    }
}

TEST_CASE("analytic derivatives match difference quotients") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ut(0.0, kTwoPi);
    const double h = 1e-4;
    for (ShapeKind kind : kAllKinds) {
        auto c = make_shape(kind, {1.0, 2.0}, 1.5);
        double max_dd = 0.0, max_d3 = 0.0;
        for (int i = 0; i < 512; ++i) {
            max_dd = std::max(max_dd, c.second_derivative(kTwoPi * i / 512.0).norm());
            // crude third-derivative scale from differences of the second
            max_d3 = std::max(max_d3, (c.second_derivative(kTwoPi * (i + 1) / 512.0) -
                                       c.second_derivative(kTwoPi * i / 512.0))
                                              .norm() /
                                          (kTwoPi / 512.0));
        }
        for (int trial = 0; trial < 1000; ++trial) {
            double t = ut(rng);
            Vec2 taylor1 = c.point(t + h) - c.point(t) - h * c.tangent(t);
            CHECK(taylor1.norm() <= 0.6 * max_dd * h * h + 1e-13);
            Vec2 taylor2 = c.tangent(t + h) - c.tangent(t) - h * c.second_derivative(t);
            CHECK(taylor2.norm() <= 0.6 * max_d3 * h * h + 1e-13);
        }
    }
}

TEST_CASE("tangent regularity and outward normals") {
    for (ShapeKind kind : kAllKinds) {
        auto c = make_shape(kind, {-2.0, 5.0}, 0.7);
        for (int i = 0; i < 720; ++i) {
            double t = kTwoPi * i / 720.0;
            CHECK(c.jacobian(t) > 1e-6);
            // catalogue shapes are star-shaped about their centers
            CHECK(c.outward_normal(t).dot(c.point(t) - c.center()) > 0.0);
        }
    }
}

TEST_CASE("reflection through a point") {
    auto circle = make_shape(ShapeKind::Circle, {0, 0}, 1.0);

    SUBCASE("unit circle is centrally symmetric about the origin") {
        auto r = reflect_through(circle, {0, 0});
        for (int i = 0; i < 256; ++i) {
            double t = kTwoPi * i / 256.0;
            Vec2 p = r.point(t);
            double best = 1e300;
            for (int j = 0; j < 4096; ++j)
                best = std::min(best, (p - circle.point(kTwoPi * j / 4096.0)).norm());
            CHECK(best < 1e-6);
        }
    }

    SUBCASE("point mapping") {
        auto r = reflect_through(circle, {1, 1});
        CHECK((r.point(0.0) - Vec2(1, 2)).norm() < 1e-15);
    }

    SUBCASE("bounding box reflects") {
        auto kite = make_shape(ShapeKind::Kite, {0, 0});
        Vec2 z0(-5, -4);
        auto r = reflect_through(kite, z0);
        double kx0 = 1e300, kx1 = -1e300, rx0 = 1e300, rx1 = -1e300;
        double ky0 = 1e300, ky1 = -1e300, ry0 = 1e300, ry1 = -1e300;
        for (int i = 0; i < 4096; ++i) {
            double t = kTwoPi * i / 4096.0;
            Vec2 p = kite.point(t), q = r.point(t);
            kx0 = std::min(kx0, p.x()); kx1 = std::max(kx1, p.x());
            ky0 = std::min(ky0, p.y()); ky1 = std::max(ky1, p.y());
            rx0 = std::min(rx0, q.x()); rx1 = std::max(rx1, q.x());
            ry0 = std::min(ry0, q.y()); ry1 = std::max(ry1, q.y());
        }
        CHECK(rx0 == doctest::Approx(2 * z0.x() - kx1).epsilon(1e-12));
        CHECK(rx1 == doctest::Approx(2 * z0.x() - kx0).epsilon(1e-12));
        CHECK(ry0 == doctest::Approx(2 * z0.y() - ky1).epsilon(1e-12));
        CHECK(ry1 == doctest::Approx(2 * z0.y() - ky0).epsilon(1e-12));
    }

    SUBCASE("reflection is an involution") {
        auto kite = make_shape(ShapeKind::Kite, {0.4, -0.7});
        auto rr = reflect_through(reflect_through(kite, {3, 1}), {3, 1});
        for (int i = 0; i < 1024; ++i) {
            double t = kTwoPi * i / 1024.0;
            CHECK((rr.point(t) - kite.point(t)).norm() < 1e-12);
        }
    }

    SUBCASE("outward normal still points outward after reflection") {
        auto apple = make_shape(ShapeKind::Apple, {0, 0});
        auto r = reflect_through(apple, {2, -1});
        for (int i = 0; i < 512; ++i) {
            double t = kTwoPi * i / 512.0;
            CHECK(r.outward_normal(t).dot(r.point(t) - r.center()) > 0.0);
        }
    }
}

TEST_CASE("uniform directions") {
    auto d4 = uniform_directions(4);
    CHECK(d4.angle(0) == 0.0);
    CHECK(d4.angle(1) == doctest::Approx(kPi / 2));
    CHECK(d4.angle(2) == doctest::Approx(kPi));
    CHECK(d4.angle(3) == doctest::Approx(3 * kPi / 2));

    auto d360 = uniform_directions(360);
    CHECK(d360.angle(1) - d360.angle(0) == doctest::Approx(kPi / 180.0));

    for (int count : {2, 3, 5, 8, 17, 360}) {
        auto ds = uniform_directions(count);
        Vec2 sum{0, 0};
        for (int j = 0; j < count; ++j) sum += ds.direction(j);
        CHECK(sum.norm() < 1e-12);
    }

    CHECK_THROWS_AS(uniform_directions(0), std::domain_error);
}

TEST_CASE("sampling grids") {
    auto g = make_grid(0, 1, 0, 1, 2, 2);
    CHECK(g.size() == 4);
    CHECK((g.point(0, 0) - Vec2(0, 0)).norm() == 0.0);
    CHECK((g.point(1, 0) - Vec2(1, 0)).norm() == 0.0);
    CHECK((g.point(0, 1) - Vec2(0, 1)).norm() == 0.0);
    CHECK((g.point(1, 1) - Vec2(1, 1)).norm() == 0.0);

    auto gl = make_grid(-12, 2, -12, 2, 141, 141);
    CHECK(gl.dx() == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(gl.dy() == doctest::Approx(0.1).epsilon(1e-14));

    auto gr = make_grid(-1, 1, -1, 1, 201, 101);
    CHECK(gr.size() == 20301);
    CHECK(gr.dx() == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(gr.dy() == doctest::Approx(0.02).epsilon(1e-14));

    CHECK_THROWS_AS(make_grid(1, 1, 0, 1, 4, 4), std::domain_error);
    CHECK_THROWS_AS(make_grid(0, 1, 0, 1, 1, 4), std::domain_error);
}

TEST_CASE("arc length converges spectrally") {
    for (ShapeKind kind : kAllKinds) {
        auto c = make_shape(kind, {0, 0}, 1.3);
        // the apple's denominator has a complex pole close enough to the real
        // axis that 128 nodes sit just outside the converged regime
        int base = kind == ShapeKind::Apple ? 256 : 128;
        CHECK(std::abs(arc_length(c, base) - arc_length(c, 2 * base)) < 1e-10);
    }
}

TEST_CASE("shape names") {
    CHECK(shape_kind_from_name("rounded-square") == ShapeKind::RoundedSquare);
    CHECK(shape_kind_name(ShapeKind::Apple) == "apple");
    CHECK_THROWS_AS(shape_kind_from_name("pentagon"), ConfigError);
    CHECK_THROWS_AS(make_shape(ShapeKind::Circle, {0, 0}, -1.0), std::domain_error);
}
