#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "echoform/geometry.hpp"

using namespace echoform;
using Catch::Approx;

TEST_CASE("curve presets evaluate the closed forms", "[geometry]") {
    const auto egg = BoundaryCurve::egg();
    const auto kite = BoundaryCurve::kite();
    const auto disk = BoundaryCurve::disk(1.5);

    CHECK(egg.point(0.0).x == Approx(1.5).margin(1e-14));
    CHECK(egg.point(0.0).y == Approx(0.0).margin(1e-14));
    CHECK(kite.point(0.0).x == Approx(1.0).margin(1e-14));
    CHECK(kite.point(0.0).y == Approx(0.0).margin(1e-14));
    CHECK(disk.point(pi / 2).x == Approx(0.0).margin(1e-14));
    CHECK(disk.point(pi / 2).y == Approx(1.5).margin(1e-14));

    // closure and wrapping
    CHECK((egg.point(-pi) - egg.point(pi)).norm() < 1e-12);
    CHECK((kite.point(1.0) - kite.point(1.0 + 2.0 * pi)).norm() < 1e-12);
}

TEST_CASE("normals and curvature at hand-computed values", "[geometry]") {
    const auto egg = BoundaryCurve::egg();
    const auto disk = BoundaryCurve::disk(2.0, {0.5, -0.25});

    // disk: radial normal and curvature 1/a
    for (double t : {0.0, 0.4, 2.0, -2.7}) {
        const Direction nu = disk.normal(t);
        CHECK(nu.x() == Approx(std::cos(t)).margin(1e-13));
        CHECK(nu.y() == Approx(std::sin(t)).margin(1e-13));
        CHECK(disk.curvature(t) == Approx(0.5).epsilon(1e-12));
    }

    // egg at t = 0: nu = (1, 0), kappa = 2.16 (symbolic differentiation)
    const Direction nu0 = egg.normal(0.0);
    CHECK(nu0.x() == Approx(1.0).margin(1e-13));
    CHECK(nu0.y() == Approx(0.0).margin(1e-13));
    CHECK(egg.curvature(0.0) == Approx(2.16).epsilon(1e-12));
    CHECK(egg.normal(pi / 2).y() > 0.0);

    // kite has a concave arc
    const auto kite = BoundaryCurve::kite();
    double kappa_min = 1e9;
    for (int i = 0; i < 512; ++i)
        kappa_min = std::min(kappa_min, kite.curvature(-pi + 2 * pi * i / 512.0));
    CHECK(kappa_min < 0.0);
}

TEST_CASE("normal is unit and orthogonal; curvature matches finite differences",
          "[geometry]") {
    for (const auto& curve :
         {BoundaryCurve::disk(1.5), BoundaryCurve::egg(), BoundaryCurve::kite()}) {
        for (int i = 0; i < 256; ++i) {
            const double t = -pi + 2.0 * pi * i / 256.0;
            const Direction nu = curve.normal(t);
            CHECK(std::abs(nu.vec().norm() - 1.0) < 1e-12);
            CHECK(std::abs(nu.dot(curve.derivative(t))) <
                  1e-10 * std::max(1.0, curve.speed(t)));

            // step pinned at 1e-5; the second difference then carries a
            // roundoff floor near eps/h^2 ~ 1e-6, covered by the margin
            const double h = 1e-5;
            const Vec2 d = (curve.point(t + h) - curve.point(t - h)) / (2.0 * h);
            const Vec2 dd =
                (curve.point(t + h) + curve.point(t - h) - 2.0 * curve.point(t)) / (h * h);
            const double kappa_fd = d.cross(dd) / std::pow(d.norm(), 3.0);
            CHECK(curve.curvature(t) ==
                  Approx(kappa_fd).epsilon(1e-5).margin(1e-5));
        }
    }
}

TEST_CASE("reflect_normal", "[geometry]") {
    const Direction ex = Direction::from_angle(0.0);
    const Direction ey = Direction::from_angle(pi / 2);

    const Direction phi = reflect_normal(-ex, ex);
    CHECK(phi.x() == Approx(1.0).margin(1e-15));
    CHECK(phi.y() == Approx(0.0).margin(1e-15));

    const Direction phi2 = reflect_normal(ey, ex);
    CHECK(phi2.x() == Approx(1.0 / std::sqrt(2.0)).margin(1e-14));
    CHECK(phi2.y() == Approx(-1.0 / std::sqrt(2.0)).margin(1e-14));

    CHECK_THROWS_AS(reflect_normal(ex, ex), UndefinedBisectorError);

    // antisymmetry and the backscatter specialization
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> ang(-pi, pi);
    for (int i = 0; i < 200; ++i) {
        const Direction a = Direction::from_angle(ang(gen));
        const Direction b = Direction::from_angle(ang(gen));
        if (std::abs(a.dot(b) - 1.0) < 1e-9) continue;
        const Direction p = reflect_normal(a, b);
        const Direction q = reflect_normal(b, a);
        CHECK((p.vec() + q.vec()).norm() < 1e-12);

        const Direction back = reflect_normal(-b, b);
        CHECK(back.dot(-b) == Approx(-1.0).margin(4e-16));
    }
}

TEST_CASE("gauss preimage and reflection points", "[geometry]") {
    const auto disk = BoundaryCurve::disk(1.5);
    const auto egg = BoundaryCurve::egg();
    const auto kite = BoundaryCurve::kite();

    const auto t_disk = disk.gauss_preimage(Direction::from_angle(0.0));
    REQUIRE(t_disk.size() == 1);
    CHECK(std::abs(t_disk[0]) < 1e-10);

    const auto t_egg = egg.gauss_preimage(Direction::from_angle(0.0));
    REQUIRE(t_egg.size() == 1);
    CHECK(std::abs(t_egg[0]) < 1e-10);

    // convex curves: exactly one preimage per direction, composing recovers it
    for (const auto& curve : {disk, egg}) {
        for (int i = 0; i < 360; ++i) {
            const Direction target = Direction::from_angle(-pi + 2.0 * pi * i / 360.0);
            const auto ts = curve.gauss_preimage(target);
            REQUIRE(ts.size() == 1);
            CHECK(angle_between(curve.normal(ts[0]), target) < 1e-9);
        }
    }

    // the kite's Gauss map is not injective
    bool multiple = false;
    for (int i = 0; i < 360 && !multiple; ++i)
        multiple =
            kite.gauss_preimage(Direction::from_angle(-pi + 2.0 * pi * i / 360.0)).size() > 1;
    CHECK(multiple);

    // reflection points
    const Direction ex = Direction::from_angle(0.0);
    const Vec2 y_disk = disk.reflection_point(ex, -ex);
    CHECK(y_disk.x == Approx(1.5).margin(1e-10));
    CHECK(y_disk.y == Approx(0.0).margin(1e-10));

    const Vec2 y_egg = egg.reflection_point(ex, -ex);
    CHECK(y_egg.x == Approx(1.5).margin(1e-10));

    const auto shifted = BoundaryCurve::disk(1.0, {2.0, 0.0});
    const Vec2 y_shift = shifted.reflection_point(ex, -ex);
    CHECK(y_shift.x == Approx(3.0).margin(1e-10));
}

TEST_CASE("illumination predicate", "[geometry]") {
    const auto disk = BoundaryCurve::disk(1.0);
    const Direction ex = Direction::from_angle(0.0);
    CHECK(disk.illuminated(pi, ex));
    CHECK_FALSE(disk.illuminated(0.0, ex));
    CHECK(BoundaryCurve::egg().illuminated(pi / 2, Direction::from_angle(-pi / 2)));
}

TEST_CASE("trigonometric curves are oriented counterclockwise", "[geometry]") {
    // clockwise circle given as a trig table gets reversed on construction
    BoundaryCurve::TrigSeries sx, sy;
    sx.a = {1.0};        // cos t
    sy.b = {-1.0};       // -sin t  (clockwise)
    const auto c = BoundaryCurve::trigonometric(sx, sy);
    const Direction nu = c.normal(c.gauss_preimage(Direction::from_angle(0.0)).at(0));
    CHECK(nu.x() == Approx(1.0).margin(1e-9));
    double area = 0.0;
    for (int i = 0; i < 1024; ++i) {
        const double t = -pi + 2.0 * pi * i / 1024.0;
        area += c.point(t).cross(c.derivative(t));
    }
    CHECK(area > 0.0);
}

TEST_CASE("half-plane hull", "[geometry]") {
    // four axis-aligned half-planes with offset -1.5 give the square [-1.5, 1.5]^2
    std::vector<HalfPlane> planes;
    for (int i = 0; i < 4; ++i)
        planes.push_back({Direction::from_angle(i * pi / 2), -1.5});
    const auto square = hull_from_detections(planes);
    REQUIRE(square.size() == 4);
    for (const auto& v : square) {
        CHECK(std::abs(v.x) == Approx(1.5).margin(1e-12));
        CHECK(std::abs(v.y) == Approx(1.5).margin(1e-12));
    }

    // 64 supporting lines of the disk: polygon within the circumscription error
    const double a = 1.5;
    std::vector<HalfPlane> circ;
    for (int i = 0; i < 64; ++i)
        circ.push_back({Direction::from_angle(-pi + 2.0 * pi * i / 64.0), -a});
    const auto poly = hull_from_detections(circ);
    double worst = 0.0;
    for (const auto& v : poly) worst = std::max(worst, v.norm() - a);
    CHECK(worst == Approx(a / std::cos(pi / 64.0) - a).epsilon(1e-9));
    CHECK(worst < 0.01);

    // all normals equal: unbounded
    std::vector<HalfPlane> bad(5, HalfPlane{Direction::from_angle(0.3), 0.0});
    CHECK_THROWS_AS(hull_from_detections(bad), DegenerateHullError);

    // convexity: consecutive edge cross products share sign
    double sign = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 e1 = poly[(i + 1) % poly.size()] - poly[i];
        const Vec2 e2 = poly[(i + 2) % poly.size()] - poly[(i + 1) % poly.size()];
        const double cr = e1.cross(e2);
        if (sign == 0.0) sign = cr > 0 ? 1.0 : -1.0;
        CHECK(cr * sign > 0.0);
    }
}
