#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "torusflow/transform.hpp"

using namespace torusflow;

TEST_SUITE_BEGIN("transform");

TEST_CASE("grid sample and fit round-trip a random band-limited field") {
    const auto f = tfh::random_field(4, 21);
    const VelocityGrid g = grid_sample(f, 16);
    const SpectralVelocity back = grid_fit(g, 4);
    double worst = 0.0;
    for (int k2 = -4; k2 <= 4; ++k2)
        for (int k1 = -4; k1 <= 4; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            worst = std::max(worst, std::fabs(back.at(k1, k2) - f.at(k1, k2)));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("grid values equal pointwise evaluation at the nodes") {
    SpectralVelocity f(2);
    f.set(1, 0, 1.0);
    const int m = 12;
    const VelocityGrid g = grid_sample(f, m);
    REQUIRE(g.grid_size == m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const TorusPoint x{kTwoPi * i / m, kTwoPi * j / m};
            const Vec2 u = f.evaluate(x);
            CHECK(g.u1[i * m + j] == doctest::Approx(u.x).epsilon(1e-12));
            CHECK(g.u2[i * m + j] == doctest::Approx(u.y).epsilon(1e-12));
        }
}

TEST_CASE("undersampled grids are rejected") {
    const auto f = tfh::random_field(4, 5);
    CHECK_THROWS_AS(grid_sample(f, 4), validation_error);   // M = N
    CHECK_THROWS_AS(grid_sample(f, 9), validation_error);   // M < 2N+2
    const VelocityGrid g = grid_sample(f, 16);
    CHECK_THROWS_AS(grid_fit(g, 8), validation_error);      // band wider than grid supports
}

TEST_CASE("grid_fit rejects grid data that is not divergence-free") {
    const auto f = tfh::random_field(3, 33);
    VelocityGrid g = grid_sample(f, 12);
    // contaminate u1 with a gradient component e^{i x1} -> cos(x1)
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) g.u1[i * 12 + j] += 0.1 * std::cos(kTwoPi * i / 12.0);
    CHECK_THROWS_AS(grid_fit(g, 3), validation_error);
}

TEST_CASE("gradient grid matches pointwise gradients at the nodes") {
    const auto f = tfh::random_field(3, 9);
    const int m = 14;
    const GradientGrid g = gradient_grid_sample(f, m);
    for (int i = 0; i < m; i += 3)
        for (int j = 0; j < m; j += 3) {
            const TorusPoint x{kTwoPi * i / m, kTwoPi * j / m};
            const Mat2 d = f.gradient(x);
            CHECK(g.g11[i * m + j] == doctest::Approx(d.a).epsilon(1e-11));
            CHECK(g.g12[i * m + j] == doctest::Approx(d.b).epsilon(1e-11));
            CHECK(g.g21[i * m + j] == doctest::Approx(d.c).epsilon(1e-11));
            CHECK(g.g22[i * m + j] == doctest::Approx(d.d).epsilon(1e-11));
        }
}

TEST_CASE("scalar transform round-trips through the raw interface") {
    const int m = 16;
    SpectralTransform tr(m);
    const auto f = tfh::random_field(4, 2);
    const ComplexModes cm = to_complex(f);
    std::vector<double> grid(static_cast<size_t>(m) * m);
    tr.synth_scalar(cm.c1.data(), 4, grid.data());
    std::vector<std::complex<double>> back(cm.c1.size());
    tr.analyze_scalar(grid.data(), 4, back.data());
    double worst = 0.0;
    for (size_t i = 0; i < back.size(); ++i) worst = std::max(worst, std::abs(back[i] - cm.c1[i]));
    CHECK(worst < 1e-12);
}

TEST_SUITE_END();
