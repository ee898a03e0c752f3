#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bhplab/geometry.hpp"
#include "bhplab/rng.hpp"

using namespace bhplab;

namespace {

TruncatedCone cone2d(double theta, double radius = 1.0) {
    return TruncatedCone{vec0(), make_vec(0.0, 1.0), theta, radius};
}

// Brute-force distance oracle: min distance over densely sampled boundary.
double dist_oracle(const DomainSpec& dom, const Vec& x, int d, int n = 20000) {
    const auto pts = sample_boundary(dom, d, n, 5150);
    double best = 1e300;
    for (const auto& p : pts) best = std::min(best, norm(sub(p, x, d), d));
    return best;
}

}  // namespace

TEST_CASE("contains: cone membership anchors") {
    const DomainSpec c = cone2d(M_PI / 4.0);
    CHECK(contains(c, make_vec(0.0, 0.5), 2));
    CHECK_FALSE(contains(c, make_vec(0.6, 0.6), 2));  // boundary ray x2 = x1 is excluded
    CHECK_FALSE(contains(c, make_vec(0.0, 0.0), 2));  // the vertex itself
    CHECK_FALSE(contains(c, make_vec(0.0, 1.5), 2));  // beyond the truncation
    CHECK_FALSE(contains(c, make_vec(0.3, -0.1), 2));

    const DomainSpec ball = Ball{make_vec(0.2, -0.1), 1.0};
    CHECK(contains(ball, make_vec(0.2, -0.1), 2));

    const DomainSpec obtuse = cone2d(2.0 * M_PI / 3.0);
    CHECK(contains(obtuse, make_vec(0.5, -0.2), 2));  // opens past the horizontal
    CHECK_FALSE(contains(obtuse, make_vec(0.2, -0.2), 2));
}

TEST_CASE("dist_to_boundary: closed-form anchors") {
    const DomainSpec hs = HalfSpace{vec0(), make_vec(0.0, 1.0)};
    CHECK(dist_to_boundary(hs, make_vec(3.0, 0.7), 2) == doctest::Approx(0.7));

    const DomainSpec ball = Ball{vec0(), 1.0};
    CHECK(dist_to_boundary(ball, make_vec(0.25, 0.0), 2) == doctest::Approx(0.75));

    // axis point of the pi/4 cone below the cap-dominated height
    const DomainSpec c = cone2d(M_PI / 4.0);
    const double a = 0.3;  // a <= 1/(1+sin(pi/4)) = 0.586
    CHECK(dist_to_boundary(c, make_vec(0.0, a), 2) ==
          doctest::Approx(a * std::sin(M_PI / 4.0)).epsilon(1e-12));
    // outside: 0
    CHECK(dist_to_boundary(c, make_vec(0.0, -1.0), 2) == 0.0);
}

TEST_CASE("dist_to_boundary: cone formula against the sampled-boundary oracle") {
    const DomainSpec c = cone2d(M_PI / 3.0, 1.0);
    Rng rng(31, 0);
    int tested = 0;
    while (tested < 40) {
        Vec x = make_vec(2.0 * rng.uniform01() - 1.0, rng.uniform01());
        if (!contains(c, x, 2)) continue;
        ++tested;
        const double d1 = dist_to_boundary(c, x, 2);
        const double d2 = dist_oracle(c, x, 2);
        // the sampled oracle can only overestimate, by at most its spacing
        CHECK(d1 <= d2 + 1e-4);
        CHECK(d1 >= d2 - 3e-3);
    }
}

TEST_CASE("dist/contains consistency and 1-Lipschitz property") {
    const DomainSpec domains[] = {cone2d(M_PI / 4.0), cone2d(2.0 * M_PI / 3.0),
                                  DomainSpec(Ball{make_vec(0.1, 0.0), 0.8}),
                                  DomainSpec(HalfSpace{vec0(), make_vec(0.0, 1.0)})};
    Rng rng(17, 0);
    for (const auto& dom : domains) {
        for (int i = 0; i < 2000; ++i) {
            Vec x = make_vec(4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0);
            Vec y = make_vec(x[0] + 0.5 * (rng.uniform01() - 0.5), x[1] + 0.5 * (rng.uniform01() - 0.5));
            const double dx = dist_to_boundary(dom, x, 2);
            const double dy = dist_to_boundary(dom, y, 2);
            CHECK((dx > 0.0) == contains(dom, x, 2));
            CHECK(std::fabs(dx - dy) <= norm(sub(x, y, 2), 2) + 1e-12);
        }
    }
}

TEST_CASE("critical angle values") {
    CHECK(critical_angle(2) == doctest::Approx(M_PI / 4.0).epsilon(1e-14));
    CHECK(critical_angle(3) == doctest::Approx(0.955316618124509).epsilon(1e-12));
    CHECK_THROWS_AS(critical_angle(1), PreconditionError);
    // d = 4 would be arccos(1/2) = pi/3; out of the supported range for
    // simulation but the formula itself is dimension-generic
}

TEST_CASE("corkscrew points satisfy their defining inequality") {
    // half-space: kappa arbitrarily close to 1
    const DomainSpec hs = HalfSpace{vec0(), make_vec(0.0, 1.0)};
    const CorkscrewResult ch = corkscrew_point(hs, BoundaryPoint{make_vec(2.0, 0.0)}, 1.0, 2);
    CHECK(ch.kappa == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist_to_boundary(hs, ch.point, 2) == doctest::Approx(1.0).epsilon(1e-12));

    // cone vertex: axis point with kappa = sin(theta)
    const DomainSpec c = cone2d(M_PI / 4.0);
    const CorkscrewResult cc = corkscrew_point(c, BoundaryPoint{vec0()}, 0.5, 2);
    CHECK(cc.point[0] == doctest::Approx(0.0));
    CHECK(cc.point[1] == doctest::Approx(0.5));
    CHECK(cc.kappa == doctest::Approx(std::sin(M_PI / 4.0)).epsilon(1e-12));

    // re-measured inequality kappa r <= delta < r on assorted domains/radii
    const DomainSpec domains[] = {c, cone2d(2.0 * M_PI / 3.0), DomainSpec(Ball{vec0(), 1.0}), hs};
    for (const auto& dom : domains) {
        for (double r : {0.1, 0.4}) {
            Vec z0 = vec0();
            if (std::holds_alternative<Ball>(dom)) z0 = make_vec(0.0, -1.0);
            const CorkscrewResult res = corkscrew_point(dom, BoundaryPoint{z0}, r, 2);
            const double delta = dist_to_boundary(dom, res.point, 2);
            CHECK(delta >= res.kappa * r * (1.0 - 1e-12));
            CHECK(delta < r * (1.0 + 1e-12));
            CHECK(res.kappa > 0.0);
        }
    }
    CHECK_THROWS_AS(corkscrew_point(c, BoundaryPoint{vec0()}, 2.0, 2), RangeError);
}

TEST_CASE("graph patch: vertical corkscrew respects the Lipschitz floor") {
    LipschitzGraphPatch p;
    p.window_radius = 1.0;
    p.lipschitz_constant = 1.0;
    p.graph = [](const Vec& y) { return std::fabs(y[0]); };
    const DomainSpec dom = p;
    const double kappa0 = 1.0 / (2.0 * std::sqrt(2.0));  // 1/(2 sqrt(1+L^2))
    const CorkscrewResult res = corkscrew_point(dom, BoundaryPoint{vec0()}, 0.2, 2);
    CHECK(res.kappa >= kappa0 - 1e-9);

    // flat graph: vertical point with kappa = 1 until the window cuts in
    LipschitzGraphPatch flat;
    flat.window_radius = 1.0;
    flat.lipschitz_constant = 1.0;
    flat.graph = [](const Vec&) { return 0.0; };
    const CorkscrewResult rf = corkscrew_point(DomainSpec(flat), BoundaryPoint{vec0()}, 0.2, 2);
    CHECK(rf.kappa >= 1.0 / std::sqrt(2.0) - 1e-9);
}

TEST_CASE("graph patch distance: clamped between gap/sqrt(1+L^2) and gap") {
    LipschitzGraphPatch p;
    p.window_radius = 4.0;
    p.lipschitz_constant = 1.0;
    p.graph = [](const Vec& y) { return std::fabs(y[0]); };
    const DomainSpec dom = p;
    Rng rng(3, 0);
    for (int i = 0; i < 200; ++i) {
        Vec x = make_vec(2.0 * rng.uniform01() - 1.0, 1.5 * rng.uniform01());
        if (!contains(dom, x, 2)) continue;
        const double gap = x[1] - std::fabs(x[0]);
        const double dd = dist_to_boundary(dom, x, 2);
        CHECK(dd <= gap + 1e-12);
        CHECK(dd >= gap / std::sqrt(2.0) - 1e-12);
        // exact value for this V-shaped graph away from the window boundary
        const double exact = std::min(4.0 - norm(x, 2), gap / std::sqrt(2.0));
        CHECK(dd == doctest::Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("cone graph patch reproduces cone membership") {
    for (double theta : {M_PI / 4.0, M_PI / 3.0}) {
        const TruncatedCone cone{vec0(), make_vec(0.0, 1.0), theta, 1.0};
        const LipschitzGraphPatch patch = cone_graph_patch(cone, 1.0, 2);
        CHECK(patch.lipschitz_constant == doctest::Approx(1.0 / std::tan(theta)));
        Rng rng(7, 0);
        int agree = 0;
        const int n = 10000;
        for (int i = 0; i < n; ++i) {
            const Vec x =
                make_vec(2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0);
            const bool a = contains(DomainSpec(cone), x, 2);
            const bool b = contains(DomainSpec(patch), x, 2);
            agree += (a == b);
        }
        CHECK(agree == n);
    }
}

TEST_CASE("cone harmonic exponent: d = 2 formula and classification") {
    auto e = cone_harmonic_exponent(2, M_PI / 4.0);
    REQUIRE(e.q.has_value());
    CHECK(*e.q == doctest::Approx(2.0));
    CHECK(e.cls == ExponentClass::critical);

    e = cone_harmonic_exponent(2, M_PI / 2.0);
    CHECK(*e.q == doctest::Approx(1.0));
    CHECK(e.cls == ExponentClass::above_critical);

    e = cone_harmonic_exponent(2, M_PI / 3.0);
    CHECK(*e.q == doctest::Approx(1.5));

    e = cone_harmonic_exponent(2, M_PI / 5.0);
    CHECK(*e.q == doctest::Approx(2.5));
    CHECK(e.cls == ExponentClass::below_critical);

    // d = 3: number only at the critical angle, classification elsewhere
    e = cone_harmonic_exponent(3, critical_angle(3));
    REQUIRE(e.q.has_value());
    CHECK(*e.q == doctest::Approx(2.0));
    e = cone_harmonic_exponent(3, 0.5);
    CHECK_FALSE(e.q.has_value());
    CHECK(e.cls == ExponentClass::below_critical);
}

TEST_CASE("boundary sampling: points sit on the boundary") {
    const DomainSpec c = cone2d(M_PI / 3.0);
    const auto pts = sample_boundary(c, 2, 500, 99);
    CHECK(pts.size() == 500);
    for (const auto& p : pts) {
        CHECK_FALSE(contains(c, p, 2));
        // every ball around the point meets the domain
        bool meets = false;
        for (int k = 0; k < 64; ++k) {
            const double ang = 2.0 * M_PI * k / 64.0;
            const Vec q = make_vec(p[0] + 1e-6 * std::cos(ang), p[1] + 1e-6 * std::sin(ang));
            meets = meets || contains(c, q, 2);
        }
        CHECK(meets);
    }
}

TEST_CASE("region: intersection distance is the minimum over parts") {
    Region r{DomainSpec(HalfSpace{vec0(), make_vec(0.0, 1.0)})};
    r = r.intersect_ball(vec0(), 2.0);
    const Vec x = make_vec(0.0, 0.5);
    CHECK(r.contains(x, 2));
    CHECK(r.dist(x, 2) == doctest::Approx(0.5));
    const auto [dmin, idx] = r.dist_with_part(make_vec(0.0, 1.9), 2);
    CHECK(dmin == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(idx == 1);
}
