#include "doctest.h"

#include <cmath>

#include "torusflow/field.hpp"
#include "torusflow/torus.hpp"
#include "torusflow/wave.hpp"

using namespace torusflow;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("wrap_coord lands in [0, 2pi)") {
    CHECK(wrap_coord(0.0) == 0.0);
    CHECK(wrap_coord(kTwoPi) == doctest::Approx(0.0));
    CHECK(wrap_coord(-0.1) == doctest::Approx(kTwoPi - 0.1));
    CHECK(wrap_coord(7.0 * kTwoPi + 1.25) == doctest::Approx(1.25));
    for (double x : {-1e9, -3.7, -1e-18, 0.0, 2.5, 1e9}) {
        const double w = wrap_coord(x);
        CHECK(w >= 0.0);
        CHECK(w < kTwoPi);
    }
}

TEST_CASE("wrap_delta lands in (-pi, pi] and is minimal") {
    CHECK(wrap_delta(0.0) == 0.0);
    CHECK(wrap_delta(3.0 * 3.14159265358979323846) == doctest::Approx(3.14159265358979323846));
    CHECK(wrap_delta(-0.5) == doctest::Approx(-0.5));
    CHECK(wrap_delta(kTwoPi + 0.25) == doctest::Approx(0.25));
    for (double d : {-9.0, -3.15, -1.0, 0.0, 1.0, 3.15, 9.0, 100.3}) {
        const double w = wrap_delta(d);
        CHECK(w > -3.14159265358979323847);
        CHECK(w <= 3.14159265358979323847);
        // same point mod 2pi
        CHECK(std::fabs(std::remainder(w - d, kTwoPi)) < 1e-12);
    }
}

TEST_CASE("torus distance is symmetric and shift-minimal") {
    const TorusPoint a = TorusPoint::wrapped(0.2, 6.1);
    const TorusPoint b = TorusPoint::wrapped(6.0, 0.3);
    CHECK(torus_distance(a, b) == doctest::Approx(torus_distance(b, a)));
    // both coordinates wrap: true separation is (0.483.., 0.483..)
    CHECK(torus_distance(a, b) < 1.0);
    // minimality against explicit lattice shifts
    double best = 1e300;
    for (int s1 = -2; s1 <= 2; ++s1)
        for (int s2 = -2; s2 <= 2; ++s2) {
            const double d1 = a.x1 - b.x1 + s1 * kTwoPi;
            const double d2 = a.x2 - b.x2 + s2 * kTwoPi;
            best = std::min(best, std::hypot(d1, d2));
        }
    CHECK(torus_distance(a, b) == doctest::Approx(best));
}

TEST_CASE("2x2 algebra: inverse, det, opnorm closed forms") {
    const Mat2 m{3.0, 0.0, 0.0, 2.0};
    CHECK(m.opnorm() == doctest::Approx(3.0));
    CHECK(m.sigma_min() == doctest::Approx(2.0));

    const double th = 0.83;
    const Mat2 rot{std::cos(th), -std::sin(th), std::sin(th), std::cos(th)};
    CHECK(rot.opnorm() == doctest::Approx(1.0));
    CHECK(rot.sigma_min() == doctest::Approx(1.0));
    CHECK(rot.det() == doctest::Approx(1.0));

    const double c = 2.0;
    const Mat2 shear{1.0, 0.0, c, 1.0};
    // singular values of a unit shear: (c + sqrt(c^2+4))/2 and its inverse
    const double smax = 0.5 * (c + std::sqrt(c * c + 4.0));
    CHECK(shear.opnorm() == doctest::Approx(smax));
    CHECK(shear.sigma_min() == doctest::Approx(1.0 / smax));

    const Mat2 g{1.3, -0.4, 2.2, 0.7};
    const Mat2 id = g * g.inverse();
    CHECK(id.a == doctest::Approx(1.0));
    CHECK(id.b == doctest::Approx(0.0));
    CHECK(id.c == doctest::Approx(0.0));
    CHECK(id.d == doctest::Approx(1.0));
    CHECK(g.trace() == doctest::Approx(2.0));
    CHECK(g.det() == doctest::Approx(1.3 * 0.7 + 0.4 * 2.2));
}

TEST_CASE("opnorm agrees with power iteration on random matrices") {
    for (int i = 0; i < 20; ++i) {
        const Mat2 m{counter_gaussian(11, 0, 1, i), counter_gaussian(11, 0, 2, i),
                     counter_gaussian(11, 0, 3, i), counter_gaussian(11, 0, 4, i)};
        // power iteration on m^T m
        const Mat2 mm = m.transpose() * m;
        Vec2 v{1.0, 0.7};
        for (int it = 0; it < 400; ++it) {
            v = mm * v;
            const double n = v.norm();
            REQUIRE(n > 0.0);
            v = v * (1.0 / n);
        }
        const double lam = (mm * v).norm();
        CHECK(m.opnorm() == doctest::Approx(std::sqrt(lam)).epsilon(1e-10));
        CHECK(m.sigma_min() * m.opnorm() == doctest::Approx(std::fabs(m.det())));
    }
}

TEST_CASE("wave lattice split and perp direction") {
    CHECK(in_zplus({1, 0}));
    CHECK(in_zplus({0, 1}));
    CHECK(in_zplus({-3, 2}));
    CHECK(!in_zplus({-1, 0}));
    CHECK(!in_zplus({0, -1}));
    CHECK(!in_zplus({3, -2}));
    // exactly one of k, -k is in Zplus
    for (int k1 = -3; k1 <= 3; ++k1)
        for (int k2 = -3; k2 <= 3; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            CHECK(in_zplus({k1, k2}) != in_zplus({-k1, -k2}));
        }
    const Vec2 p = unit_perp({3, 4});
    CHECK(p.norm() == doctest::Approx(1.0));
    CHECK(p.x * 3 + p.y * 4 == doctest::Approx(0.0));
    CHECK(wave_norm({3, 4}) == doctest::Approx(5.0));
    CHECK(wave_sup({3, -4}) == 4);
}

TEST_CASE("basis element values at hand-evaluated points") {
    // sine mode k=(1,0): e(x) = (0,-1) sin(x1)
    const Vec2 v1 = basis_eval({1, 0}, {3.14159265358979323846 / 2.0, 0.0});
    CHECK(v1.x == doctest::Approx(0.0));
    CHECK(v1.y == doctest::Approx(-1.0));
    // sine mode k=(0,1) vanishes at the origin
    const Vec2 v2 = basis_eval({0, 1}, {0.0, 0.0});
    CHECK(v2.x == doctest::Approx(0.0));
    CHECK(v2.y == doctest::Approx(0.0));
    // cosine mode k=(-1,0): e(x) = (0,1) cos(x1), value (0,1) at the origin
    const Vec2 v3 = basis_eval({-1, 0}, {0.0, 0.0});
    CHECK(v3.x == doctest::Approx(0.0));
    CHECK(v3.y == doctest::Approx(1.0));
    CHECK_THROWS_AS(basis_eval({0, 0}, {1.0, 1.0}), validation_error);
}

TEST_CASE("basis elements are numerically divergence-free") {
    const double h = 1e-6;
    for (int i = 0; i < 30; ++i) {
        const WaveIndex k{(i % 7) - 3, (i % 5) - 2};
        if (is_zero(k)) continue;
        const TorusPoint x{0.31 + 0.17 * i, 5.9 - 0.23 * i};
        const Vec2 dx1p = basis_eval(k, TorusPoint::wrapped(x.x1 + h, x.x2));
        const Vec2 dx1m = basis_eval(k, TorusPoint::wrapped(x.x1 - h, x.x2));
        const Vec2 dx2p = basis_eval(k, TorusPoint::wrapped(x.x1, x.x2 + h));
        const Vec2 dx2m = basis_eval(k, TorusPoint::wrapped(x.x1, x.x2 - h));
        const double div = (dx1p.x - dx1m.x + dx2p.y - dx2m.y) / (2.0 * h);
        CHECK(std::fabs(div) < 1e-6);
    }
}

TEST_SUITE_END();
