#include "doctest.h"

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "torusflow/forcing.hpp"

using namespace torusflow;

TEST_SUITE_BEGIN("forcing-noise");

TEST_CASE("power-law amplitudes at hand-computed values") {
    const ForcingSpec f = build_forcing(8, 4.0, 5.5, 1, 1.0);
    CHECK(f.q_at(1, 0) == doctest::Approx(1.0));
    CHECK(f.q_at(0, 1) == doctest::Approx(1.0));
    CHECK(f.q_at(-1, 0) == doctest::Approx(1.0));
    CHECK(f.q_at(2, 0) == doctest::Approx(std::pow(2.0, -5.5)));  // ~0.02210
    CHECK(f.q_at(1, 1) == doctest::Approx(std::pow(std::sqrt(2.0), -5.5)));
    CHECK(f.q[f.side() * 8 + 8] == 0.0);  // origin slot carries no noise
    // isotropy of the law
    CHECK(f.q_at(3, 4) == doctest::Approx(f.q_at(4, 3)));
    CHECK(f.q_at(3, 4) == doctest::Approx(f.q_at(-3, -4)));
}

TEST_CASE("decay-exponent and regularity windows are enforced") {
    CHECK_THROWS_AS(build_forcing(8, 4.0, 7.0), validation_error);   // above s+2
    CHECK_THROWS_AS(build_forcing(8, 4.0, 5.0), validation_error);   // boundary s+1
    CHECK_THROWS_AS(build_forcing(8, 4.0, 6.0), validation_error);   // boundary s+2
    CHECK_THROWS_AS(build_forcing(8, 4.0, 4.2), validation_error);   // below s+1
    CHECK_THROWS_AS(build_forcing(8, 1.0, 2.5), validation_error);   // s < 4
    CHECK_THROWS_AS(build_forcing(8, 4.0, 5.5, 1, 0.0), validation_error);  // c = 0
    CHECK_THROWS_AS(build_forcing(8, 4.0, 5.5, 0), validation_error);       // bad threshold
    CHECK_THROWS_AS(build_forcing(0, 4.0, 5.5), validation_error);          // empty band
    CHECK_NOTHROW(build_forcing(8, 5.0, 6.5));  // window moves with s
}

TEST_CASE("counter generator is a pure function of its arguments") {
    CHECK(counter_gaussian(42, 3, -1, 17) == counter_gaussian(42, 3, -1, 17));
    CHECK(counter_gaussian(42, 3, -1, 17) != counter_gaussian(42, 3, -1, 18));
    CHECK(counter_gaussian(42, 3, -1, 17) != counter_gaussian(43, 3, -1, 17));
    CHECK(counter_gaussian(42, 3, -1, 17) != counter_gaussian(42, -1, 3, 17));
}

TEST_CASE("increment moments match the Wiener law") {
    const double dt = 1e-3;
    NoiseStream ns(7, dt);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int m = 0; m < n; ++m) {
        const double dw = ns.increment({1, 0}, m);
        sum += dw;
        sum2 += dw * dw;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 4.0 * std::sqrt(dt / n));  // 4 sigma of the mean
    CHECK(var == doctest::Approx(dt).epsilon(0.05));
}

TEST_CASE("distinct modes draw uncorrelated streams") {
    NoiseStream ns(11, 1.0);
    const int n = 100000;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int m = 0; m < n; ++m) {
        const double x = ns.standard_normal({1, 0}, m);
        const double y = ns.standard_normal({0, 1}, m);
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    CHECK(std::fabs(sxy / std::sqrt(sxx * syy)) < 0.02);
}

TEST_CASE("time shift acts as an exact semigroup on the driving path") {
    NoiseStream ns(5, 0.01);
    const NoiseStream s0 = ns.shifted(0);
    const NoiseStream sab = ns.shifted(3).shifted(4);
    const NoiseStream s7 = ns.shifted(7);
    const WaveIndex modes[] = {{1, 0}, {0, 1}, {2, -1}, {-3, 3}, {1, 1}};
    for (int m = 0; m < 100; ++m)
        for (const auto& k : modes) {
            CHECK(s0.increment(k, m) == ns.increment(k, m));          // identity shift
            CHECK(sab.increment(k, m) == s7.increment(k, m));         // composition law
            CHECK(s7.increment(k, m) == ns.increment(k, m + 7));      // plain offset
        }
}

TEST_CASE("shifted stream keeps stationary increments") {
    const double dt = 0.002;
    NoiseStream ns = NoiseStream(19, dt).shifted(12345);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int m = 0; m < n; ++m) {
        const double dw = ns.increment({2, 1}, m);
        sum += dw;
        sum2 += dw * dw;
    }
    const double var = sum2 / n - (sum / n) * (sum / n);
    CHECK(var == doctest::Approx(dt).epsilon(0.05));
}

TEST_CASE("square fill agrees with per-mode increments") {
    NoiseStream ns(3, 0.5);
    const int cutoff = 3;
    const int side = 2 * cutoff + 1;
    std::vector<double> square(static_cast<size_t>(side) * side, -1.0);
    ns.increments(cutoff, 42, square.data());
    CHECK(square[(0 + cutoff) * side + (0 + cutoff)] == 0.0);
    for (int k2 = -cutoff; k2 <= cutoff; ++k2)
        for (int k1 = -cutoff; k1 <= cutoff; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            CHECK(square[(k2 + cutoff) * side + (k1 + cutoff)] ==
                  ns.increment({k1, k2}, 42));
        }
}

TEST_CASE("stream parameters are validated") {
    CHECK_THROWS_AS(NoiseStream(1, 0.0), validation_error);
    CHECK_THROWS_AS(NoiseStream(1, -0.1), validation_error);
    NoiseStream ns(1, 0.1);
    CHECK_THROWS_AS(ns.increment({0, 0}, 3), validation_error);
}

TEST_SUITE_END();
