#include "doctest.h"

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "torusflow/horseshoe.hpp"

using namespace torusflow;

namespace {
constexpr double kPi = 3.14159265358979323846;

BallPair antipodal(double x1, double x2, double r) {
    return BallPair{{{TorusPoint::wrapped(x1, x2)}, r},
                    {{TorusPoint::wrapped(x1 + kPi, x2 + kPi)}, r}};
}

FlowOracle oracle_of(const TrajectoryView& tr) {
    FlowOracle o;
    o.trajectory = &tr;
    return o;
}

ItineraryWord word_of(std::vector<int> idx, std::vector<std::uint8_t> sym, double tau) {
    ItineraryWord w;
    w.indices = std::move(idx);
    w.symbols = std::move(sym);
    w.tau = tau;
    return w;
}

// closed-form shear transport used as the independent search oracle
TorusPoint shear_image(TorusPoint x, double a, double t) {
    return TorusPoint::wrapped(x.x1, x.x2 - a * t * std::sin(x.x1));
}

bool in_ball(TorusPoint x, const TorusBall& b) {
    return torus_distance(x, b.center) <= b.radius;
}
}  // namespace

TEST_SUITE_BEGIN("horseshoe");

TEST_CASE("ball and word validation") {
    CHECK_THROWS_AS(validate_ball({{1.0, 1.0}, 0.0}), validation_error);
    CHECK_THROWS_AS(validate_ball({{1.0, 1.0}, -0.2}), validation_error);
    CHECK_THROWS_AS(validate_ball({{1.0, 1.0}, kPi}), validation_error);
    CHECK_NOTHROW(validate_ball({{1.0, 1.0}, 0.5}));

    // wrap-aware disjointness: these centers are only 0.2 apart on the torus
    BallPair wrapped{{{0.1, 0.0}, 0.5}, {{kTwoPi - 0.1, 0.0}, 0.5}};
    CHECK_THROWS_AS(validate_balls(wrapped), validation_error);
    CHECK_NOTHROW(validate_balls(antipodal(1.0, 2.0, 0.5)));

    CHECK_THROWS_AS(validate_word(word_of({}, {}, 1.0)), validation_error);
    CHECK_THROWS_AS(validate_word(word_of({0, 0}, {1, 2}, 1.0)), validation_error);
    CHECK_THROWS_AS(validate_word(word_of({1, 0}, {1, 2}, 1.0)), validation_error);
    CHECK_THROWS_AS(validate_word(word_of({0, 1}, {1, 3}, 1.0)), validation_error);
    CHECK_THROWS_AS(validate_word(word_of({0, 1}, {1}, 1.0)), validation_error);
    CHECK_THROWS_AS(validate_word(word_of({0}, {1}, 0.0)), validation_error);
    CHECK_NOTHROW(validate_word(word_of({0, 2, 5}, {1, 2, 1}, 0.5)));
}

TEST_CASE("still flow realizes single-letter words at the ball center") {
    const FrozenTrajectory tr(SpectralVelocity(1), 0.1, 20);
    const BallPair balls = antipodal(1.2, 4.0, 0.5);

    for (std::uint8_t sym : {std::uint8_t(1), std::uint8_t(2)}) {
        const WordReport rep = realize_word(balls, word_of({0}, {sym}, 1.0), oracle_of(tr));
        REQUIRE(rep.status == WordStatus::certified);
        const CellCertificate& c = rep.certificate;
        const TorusBall& target = sym == 1 ? balls.first : balls.second;
        CHECK(torus_distance(c.point, target.center) < 0.5);
        REQUIRE(c.margins.size() == 1);
        REQUIRE(c.lipschitz.size() == 1);
        REQUIRE(c.images.size() == 1);
        CHECK(c.margins[0] > 0.0);
        // identity flow: image is the start point, Lipschitz bound is the
        // safety factor times opnorm(I) = 1.5
        CHECK(torus_distance(c.images[0], c.point) == 0.0);
        CHECK(c.lipschitz[0] == doctest::Approx(kLipschitzSafety));
        const double halfdiag = c.half_width * std::sqrt(2.0);
        const double dist = torus_distance(c.images[0], target.center);
        CHECK(c.margins[0] ==
              doctest::Approx(target.radius - dist - c.lipschitz[0] * halfdiag));
    }
}

TEST_CASE("still flow cannot visit two disjoint balls") {
    const FrozenTrajectory tr(SpectralVelocity(1), 0.1, 30);
    const BallPair balls = antipodal(1.2, 4.0, 0.5);
    const WordReport rep =
        realize_word(balls, word_of({0, 1}, {1, 2}, 1.0), oracle_of(tr));
    CHECK(rep.status == WordStatus::excluded);
    CHECK(rep.frontier_size == 0);
    CHECK(rep.failure == "");
}

TEST_CASE("still flow word table: only constant words survive") {
    const FrozenTrajectory tr(SpectralVelocity(1), 0.1, 40);
    const BallPair balls = antipodal(0.9, 5.5, 0.55);
    const HorseshoeReport rep =
        certify_full_horseshoe(balls, {0, 3}, 0.7, oracle_of(tr));
    REQUIRE(rep.words.size() == 4);
    CHECK(!rep.full_horseshoe);
    int certified = 0, excluded = 0;
    for (const auto& w : rep.words) {
        REQUIRE(w.symbols.size() == 2);
        const bool constant = w.symbols[0] == w.symbols[1];
        if (constant) {
            CHECK(w.status == WordStatus::certified);
            ++certified;
        } else {
            CHECK(w.status == WordStatus::excluded);
            ++excluded;
        }
    }
    CHECK(certified == 2);
    CHECK(excluded == 2);
    CHECK(rep.cells_evaluated > 0);
    CHECK(rep.deepest_cell > 0);
}

TEST_CASE("frozen shear realizes exactly the transported words") {
    // tau = pi, a = 1: near x1 = pi/2 the map shifts x2 by about -pi, so the
    // ball at (pi/2, 0) lands on the ball at (pi/2, pi) and vice versa.
    const double a = 1.0, tau = kPi;
    const FrozenTrajectory tr(tfh::shear_field(a), tau / 64.0, 160);
    const BallPair balls{{{kPi / 2.0, 0.0}, 0.6}, {{kPi / 2.0, kPi}, 0.6}};
    const FlowOracle orc = oracle_of(tr);

    const HorseshoeReport rep = certify_full_horseshoe(balls, {0, 1}, tau, orc);
    REQUIRE(rep.words.size() == 4);
    CHECK(!rep.full_horseshoe);
    for (const auto& w : rep.words) {
        const bool alternating = w.symbols[0] != w.symbols[1];
        if (alternating)
            CHECK(w.status == WordStatus::certified);
        else
            CHECK(w.status == WordStatus::excluded);
    }

    // certified points satisfy the closed-form transport with their margins
    for (const auto& w : rep.words) {
        if (w.status != WordStatus::certified) continue;
        const CellCertificate& c = w.certificate;
        const TorusPoint img = shear_image(c.point, a, tau);
        CHECK(torus_distance(img, c.images[1]) < 1e-9);
        const TorusBall& t0 = w.symbols[0] == 1 ? balls.first : balls.second;
        const TorusBall& t1 = w.symbols[1] == 1 ? balls.first : balls.second;
        CHECK(torus_distance(c.point, t0.center) <= t0.radius - c.margins[0]);
        CHECK(torus_distance(img, t1.center) <= t1.radius - c.margins[1] + 1e-9);
    }
}

TEST_CASE("tree decisions agree with a closed-form grid search") {
    const double a = 1.0, tau = kPi;
    const FrozenTrajectory tr(tfh::shear_field(a), tau / 64.0, 160);
    const BallPair balls{{{kPi / 2.0, 0.0}, 0.6}, {{kPi / 2.0, kPi}, 0.6}};
    const HorseshoeReport rep = certify_full_horseshoe(balls, {0, 1}, tau, oracle_of(tr));

    for (const auto& w : rep.words) {
        const TorusBall& t0 = w.symbols[0] == 1 ? balls.first : balls.second;
        const TorusBall& t1 = w.symbols[1] == 1 ? balls.first : balls.second;
        bool exists = false;
        for (int i = 0; i < 400 && !exists; ++i)
            for (int j = 0; j < 400 && !exists; ++j) {
                const TorusPoint x{kTwoPi * i / 400.0, kTwoPi * j / 400.0};
                exists = in_ball(x, t0) && in_ball(shear_image(x, a, tau), t1);
            }
        if (w.status == WordStatus::certified) CHECK(exists);
        if (w.status == WordStatus::excluded) CHECK(!exists);
    }
}

TEST_CASE("certificates survive finer re-integration with half margins") {
    const double tau = kPi;
    const FrozenTrajectory tr(tfh::shear_field(1.0), tau / 64.0, 160);
    const BallPair balls{{{kPi / 2.0, 0.0}, 0.6}, {{kPi / 2.0, kPi}, 0.6}};
    const ItineraryWord w = word_of({0, 1}, {1, 2}, tau);
    const WordReport rep = realize_word(balls, w, oracle_of(tr));
    REQUIRE(rep.status == WordStatus::certified);
    const ReverifyResult rv = reverify_certificate(balls, w, rep.certificate, oracle_of(tr));
    CHECK(rv.passed);
    REQUIRE(rv.margins.size() == 2);
    for (size_t j = 0; j < 2; ++j)
        CHECK(rv.margins[j] >= 0.5 * rep.certificate.margins[j]);
}

TEST_CASE("enlarging a ball never un-certifies a word") {
    const double tau = kPi;
    const FrozenTrajectory tr(tfh::shear_field(1.0), tau / 64.0, 160);
    const ItineraryWord w = word_of({0, 1}, {1, 2}, tau);
    const BallPair small{{{kPi / 2.0, 0.0}, 0.6}, {{kPi / 2.0, kPi}, 0.6}};
    const BallPair big{{{kPi / 2.0, 0.0}, 0.75}, {{kPi / 2.0, kPi}, 0.75}};
    const WordReport rs = realize_word(small, w, oracle_of(tr));
    const WordReport rb = realize_word(big, w, oracle_of(tr));
    REQUIRE(rs.status == WordStatus::certified);
    CHECK(rb.status == WordStatus::certified);
}

TEST_CASE("swapping ball labels mirrors the word table") {
    const double tau = kPi;
    const FrozenTrajectory tr(tfh::shear_field(1.0), tau / 64.0, 160);
    const BallPair balls{{{kPi / 2.0, 0.0}, 0.6}, {{kPi / 2.0, kPi}, 0.6}};
    const BallPair swapped{balls.second, balls.first};
    const HorseshoeReport a = certify_full_horseshoe(balls, {0, 1}, tau, oracle_of(tr));
    const HorseshoeReport b = certify_full_horseshoe(swapped, {0, 1}, tau, oracle_of(tr));
    REQUIRE(a.words.size() == b.words.size());
    for (const auto& wa : a.words) {
        // complemented word in the swapped report
        for (const auto& wb : b.words) {
            bool complement = true;
            for (size_t i = 0; i < wa.symbols.size(); ++i)
                complement = complement && (wb.symbols[i] == 3 - wa.symbols[i]);
            if (!complement) continue;
            CHECK(wa.status == wb.status);
            if (wa.status == WordStatus::certified) {
                REQUIRE(wa.certificate.margins.size() == wb.certificate.margins.size());
                for (size_t j = 0; j < wa.certificate.margins.size(); ++j)
                    CHECK(wa.certificate.margins[j] ==
                          doctest::Approx(wb.certificate.margins[j]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("reports are reproducible and worker-count independent") {
    const StoredTrajectory tr = tfh::stochastic_trajectory(4, 0.02, 4.0, 5, 3.0);
    const BallPair balls = antipodal(1.0, 1.0, 0.8);
    SearchBudget budget;
    budget.max_cells = 3000;
    budget.max_depth = 8;
    const HorseshoeReport a = certify_full_horseshoe(balls, {0, 1}, 1.0, oracle_of(tr), budget);
    const HorseshoeReport b = certify_full_horseshoe(balls, {0, 1}, 1.0, oracle_of(tr), budget);
    SearchBudget par = budget;
    par.workers = 3;
    const HorseshoeReport c = certify_full_horseshoe(balls, {0, 1}, 1.0, oracle_of(tr), par);
    CHECK(a.cells_evaluated == b.cells_evaluated);
    CHECK(a.cells_evaluated == c.cells_evaluated);
    REQUIRE(a.words.size() == b.words.size());
    for (size_t i = 0; i < a.words.size(); ++i) {
        CHECK(a.words[i].status == b.words[i].status);
        CHECK(a.words[i].status == c.words[i].status);
        CHECK(a.words[i].depth_reached == c.words[i].depth_reached);
        if (a.words[i].status == WordStatus::certified) {
            CHECK(a.words[i].certificate.point.x1 == c.words[i].certificate.point.x1);
            CHECK(a.words[i].certificate.point.x2 == c.words[i].certificate.point.x2);
            for (size_t j = 0; j < a.words[i].certificate.margins.size(); ++j)
                CHECK(a.words[i].certificate.margins[j] == c.words[i].certificate.margins[j]);
        }
    }
}

TEST_CASE("budget and depth exhaustion are reported distinctly") {
    const StoredTrajectory tr = tfh::stochastic_trajectory(4, 0.02, 4.0, 6, 3.0);
    const BallPair balls = antipodal(1.0, 1.0, 0.5);

    SearchBudget tiny;
    tiny.max_cells = 16;
    const WordReport rb = realize_word(balls, word_of({0, 1, 2}, {1, 2, 1}, 1.0),
                                       oracle_of(tr), tiny);
    if (rb.status == WordStatus::exhausted) {
        CHECK(rb.failure == "budget");
        CHECK(rb.frontier_size > 0);
    }

    SearchBudget shallow;
    shallow.max_depth = 0;  // the root cell alone can never decide this word
    const WordReport rd = realize_word(balls, word_of({0, 1}, {1, 2}, 1.0),
                                       oracle_of(tr), shallow);
    REQUIRE(rd.status == WordStatus::exhausted);
    CHECK(rd.failure == "depth");
    CHECK(rd.frontier_size == 1);
    CHECK(rd.depth_reached == 0);

    SearchBudget bad;
    bad.max_cells = 0;
    CHECK_THROWS_AS(realize_word(balls, word_of({0}, {1}, 1.0), oracle_of(tr), bad),
                    validation_error);
}

TEST_CASE("word sets longer than the exhaustive bound are rejected") {
    const FrozenTrajectory tr(SpectralVelocity(1), 0.5, 40);
    const BallPair balls = antipodal(1.0, 1.0, 0.5);
    std::vector<int> indices(kMaxItinerary + 1);
    for (int i = 0; i <= kMaxItinerary; ++i) indices[i] = i;
    CHECK_THROWS_AS(certify_full_horseshoe(balls, indices, 0.1, oracle_of(tr)),
                    validation_error);
}

TEST_CASE("oracle coverage is validated against the word horizon") {
    const FrozenTrajectory tr(SpectralVelocity(1), 0.1, 10);  // covers 1 time unit
    const BallPair balls = antipodal(1.0, 1.0, 0.5);
    CHECK_THROWS_AS(realize_word(balls, word_of({0, 5}, {1, 1}, 1.0), oracle_of(tr)),
                    validation_error);
    // tau off the segment grid
    CHECK_THROWS_AS(realize_word(balls, word_of({0, 1}, {1, 1}, 0.55), oracle_of(tr)),
                    validation_error);
}

TEST_CASE("still-flow hitting density keeps exactly the first index") {
    const FrozenTrajectory tr(SpectralVelocity(1), 0.5, 20);
    const BallPair balls = antipodal(0.8, 2.0, 0.5);
    DensityOptions opt;
    opt.tau = 1.0;
    opt.horizon = 5;
    opt.cap = 2;
    const DensityReport rep = estimate_hitting_density(balls, oracle_of(tr), opt);
    REQUIRE(rep.records.size() == 5);
    CHECK(rep.certified == std::vector<int>{0});
    CHECK(rep.undetermined.empty());
    CHECK(rep.density == doctest::Approx(0.2));
    CHECK(rep.records[0].outcome == 'k');
    for (int j = 1; j < 5; ++j) CHECK(rep.records[j].outcome == 'f');
    CHECK(rep.horizon == 5);
    CHECK(rep.last_window.words.size() == 4);
    CHECK(symbolic_entropy_lower_bound(rep) ==
          doctest::Approx(0.2 * std::log(2.0) / 1.0));
}

TEST_CASE("single-index horizon always certifies") {
    const FrozenTrajectory tr(SpectralVelocity(1), 0.5, 4);
    const BallPair balls = antipodal(0.8, 2.0, 0.5);
    DensityOptions opt;
    opt.tau = 1.0;
    opt.horizon = 1;
    opt.cap = 2;
    const DensityReport rep = estimate_hitting_density(balls, oracle_of(tr), opt);
    CHECK(rep.density == doctest::Approx(1.0));
    CHECK(rep.certified == std::vector<int>{0});
    CHECK(symbolic_entropy_lower_bound(rep) == doctest::Approx(std::log(2.0)));
}

TEST_SUITE_END();
