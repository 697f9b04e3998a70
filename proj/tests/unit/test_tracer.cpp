#include "doctest.h"

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "torusflow/interp.hpp"
#include "torusflow/tracer.hpp"

using namespace torusflow;

namespace {
constexpr double kPi = 3.14159265358979323846;

FrozenTrajectory frozen(const SpectralVelocity& f, double dt, std::int64_t segs) {
    return FrozenTrajectory(f, dt, segs);
}
}  // namespace

TEST_SUITE_BEGIN("tracer");

TEST_CASE("identity flow: positions, flow map, and Jacobians stay put") {
    const FrozenTrajectory tr = frozen(SpectralVelocity(2), 0.1, 30);
    const TorusPoint x0{2.5, 0.7};

    const TorusPoint x1 = flow_map(tr, x0, 0.0);
    CHECK(torus_distance(x1, x0) == 0.0);

    Mat2 jac;
    const TorusPoint x2 = flow_map(tr, x0, 3.0, {}, &jac);
    CHECK(torus_distance(x2, x0) < 1e-14);
    CHECK((jac - Mat2::identity()).frob2() < 1e-26);

    for (double h : {1e-3, 1e-5, 1e-7}) {
        const Mat2 fd = finite_difference_jacobian(tr, x0, 2.0, h);
        CHECK((fd - Mat2::identity()).frob2() < 1e-18);
    }

    TracerState t{x0, 0.0};
    TangentState d;
    advect_tangent(t, d, FlowState{0, 0.0, tr.field(0)}, FlowState{1, 0.1, tr.field(1)});
    CHECK(torus_distance(t.position, x0) == 0.0);
    CHECK((d.matrix - Mat2::identity()).frob2() == 0.0);
}

TEST_CASE("frozen shear transports by its closed-form orbit") {
    const double a = 1.0, dt = 1e-3, T = 2.0;
    const FrozenTrajectory tr = frozen(tfh::shear_field(a), dt, std::int64_t(T / dt));
    const TorusPoint x0{1.1, 4.2};

    Mat2 jac;
    const TorusPoint xT = flow_map(tr, x0, T, {}, &jac);
    const TorusPoint expect = TorusPoint::wrapped(x0.x1, x0.x2 - a * T * std::sin(x0.x1));
    CHECK(torus_distance(xT, expect) < 1e-10);

    // variational solution D = [[1,0],[-a t cos x1, 1]]
    CHECK(jac.a == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::fabs(jac.b) < 1e-10);
    CHECK(jac.c == doctest::Approx(-a * T * std::cos(x0.x1)).epsilon(1e-8));
    CHECK(jac.d == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(jac.det() == doctest::Approx(1.0).epsilon(1e-12));

    const Mat2 fd = finite_difference_jacobian(tr, x0, T, 1e-5);
    CHECK(std::fabs(fd.c - jac.c) < 1e-6);
}

TEST_CASE("tracer stepping converges at fourth order") {
    // Two-mode cellular flow: no closed form, so compare against a fine
    // reference integration of the same frozen field.
    const auto f = tfh::cellular_field(1.0, 0.7);
    const FrozenTrajectory tr = frozen(f, 0.2, 10);
    const TorusPoint x0{1.9, 2.6};

    auto endpoint = [&](int substeps) {
        AdvectOptions opt;
        opt.substeps = substeps;
        opt.mode = EvalMode::exact;
        return flow_map(tr, x0, 2.0, opt);
    };
    const TorusPoint ref = endpoint(64);
    const double e1 = torus_distance(endpoint(1), ref);   // h = 0.2
    const double e2 = torus_distance(endpoint(2), ref);   // h = 0.1
    const double e4 = torus_distance(endpoint(4), ref);   // h = 0.05
    REQUIRE(e1 > 1e-12);
    REQUIRE(e2 > 1e-13);
    CHECK(e1 / e2 > 11.0);
    CHECK(e1 / e2 < 22.0);
    CHECK(e2 / e4 > 11.0);
    CHECK(e2 / e4 < 22.0);
}

TEST_CASE("tangent integration agrees with finite differences on noisy runs") {
    for (std::uint64_t seed : {3u, 4u}) {
        const StoredTrajectory tr = tfh::stochastic_trajectory(8, 1e-2, 1.0, seed, 3.0);
        const TorusPoint x0{2.2 + 0.3 * seed, 1.0};
        Mat2 jac;
        flow_map(tr, x0, 1.0, {}, &jac);
        const Mat2 fd = finite_difference_jacobian(tr, x0, 1.0, 1e-5);
        const Mat2 diff = jac - fd;
        const double worst = std::max(std::max(std::fabs(diff.a), std::fabs(diff.b)),
                                      std::max(std::fabs(diff.c), std::fabs(diff.d)));
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("the tangent cocycle stays unimodular over long runs") {
    const StoredTrajectory tr = tfh::stochastic_trajectory(8, 1e-3, 10.0, 6, 3.0);
    Mat2 jac;
    flow_map(tr, {0.8, 5.1}, 10.0, {}, &jac);  // 10^4 velocity segments
    CHECK(std::fabs(jac.det() - 1.0) < 1e-8);
}

TEST_CASE("flow maps compose along the shifted trajectory") {
    const StoredTrajectory tr = tfh::stochastic_trajectory(6, 1e-2, 6.0, 12, 3.0);
    const TorusPoint x0{0.4, 3.3};
    const double t1 = 2.5, t2 = 3.5;

    const TorusPoint direct = flow_map(tr, x0, t1 + t2);
    const TorusPoint mid = flow_map(tr, x0, t1);
    const tfh::OffsetView shifted(tr, std::int64_t(t1 / tr.dt() + 0.5));
    const TorusPoint composed = flow_map(shifted, mid, t2);
    CHECK(torus_distance(direct, composed) < 1e-8);

    // frozen-field composition against the closed form
    const FrozenTrajectory sh = frozen(tfh::shear_field(0.8), 0.05, 100);
    const TorusPoint y1 = flow_map(sh, x0, 2.0);
    const TorusPoint y2 = flow_map(sh, y1, 3.0);
    const TorusPoint yi = TorusPoint::wrapped(x0.x1, x0.x2 - 0.8 * 5.0 * std::sin(x0.x1));
    CHECK(torus_distance(y2, yi) < 1e-9);
}

TEST_CASE("spline interpolation tracks exact evaluation") {
    const auto f = tfh::random_field(16, 160, 2.5);
    double uscale = 0.0;
    for (int i = 0; i < 100; ++i) {
        const TorusPoint x = TorusPoint::wrapped(0.0628 * i, 6.2 - 0.0613 * i);
        uscale = std::max(uscale, f.evaluate(x).norm());
    }
    REQUIRE(uscale > 0.0);

    const SplineField fine(f, 32);
    const SplineField prod(f, 8);
    double worst_fine = 0.0, worst_prod = 0.0, worst_grad = 0.0;
    for (int i = 0; i < 200; ++i) {
        const TorusPoint x = TorusPoint::wrapped(0.0314 * i + 0.005, 6.28 - 0.0311 * i);
        Vec2 ue, us;
        Mat2 ge, gs;
        f.evaluate_with_gradient(x, ue, ge);
        fine.eval(x, us, gs);
        worst_fine = std::max(worst_fine, (us - ue).norm());
        worst_grad = std::max(worst_grad, std::sqrt((gs - ge).frob2()));
        CHECK(std::fabs(gs.trace()) < 1e-14);  // trace-corrected interpolation
        worst_prod = std::max(worst_prod, (prod.eval_velocity(x) - ue).norm());
    }
    CHECK(worst_fine < 1e-6 * uscale);
    CHECK(worst_grad < 1e-4 * uscale);
    CHECK(worst_prod < 1e-2 * uscale);
}

TEST_CASE("interpolated advection stays close to exact advection") {
    const StoredTrajectory tr = tfh::stochastic_trajectory(16, 1e-2, 1.0, 8, 3.0);
    AdvectOptions exact;
    exact.mode = EvalMode::exact;
    AdvectOptions interp;
    interp.mode = EvalMode::interpolated;
    interp.spline_factor = 16;
    const TorusPoint x0{3.0, 0.5};
    const TorusPoint a = flow_map(tr, x0, 1.0, exact);
    const TorusPoint b = flow_map(tr, x0, 1.0, interp);
    CHECK(torus_distance(a, b) < 2e-4);
}

TEST_CASE("batch advancement equals one-by-one advancement") {
    const StoredTrajectory tr = tfh::stochastic_trajectory(6, 1e-2, 2.0, 14, 3.0);
    std::vector<OrbitProbe> probes(5);
    for (int i = 0; i < 5; ++i) probes[i].x = TorusPoint::wrapped(0.9 * i + 0.2, 1.3 * i);
    std::vector<OrbitProbe> single = probes;

    advect_batch(tr, 0, 150, probes);
    for (auto& p : single) {
        Mat2 jac;
        p.x = flow_map(tr, p.x, 150 * tr.dt(), {}, &jac);
        p.jacobian = jac;
    }
    for (int i = 0; i < 5; ++i) {
        CHECK(torus_distance(probes[i].x, single[i].x) < 1e-12);
        CHECK((probes[i].jacobian - single[i].jacobian).frob2() < 1e-20);
    }
}

TEST_CASE("velocity decorrelation clock behaves on both flow classes") {
    // frozen shear: the velocity seen by a tracer never changes
    const FrozenTrajectory sh = frozen(tfh::shear_field(1.0), 0.05, 200);
    std::vector<TorusPoint> starts;
    for (int i = 0; i < 16; ++i) starts.push_back(TorusPoint::wrapped(0.4 * i, 0.7 * i));
    const DecorrelationReport flat = lagrangian_decorrelation(sh, starts, 4.0);
    REQUIRE(!flat.correlation.empty());
    CHECK(flat.correlation.front() == doctest::Approx(1.0));
    for (double c : flat.correlation) CHECK(c > 0.99);
    CHECK(flat.efold_time == doctest::Approx(4.0));  // never crossed: reports the horizon

    // stochastic flow: finite positive decorrelation time
    const StoredTrajectory tr = tfh::stochastic_trajectory(8, 1e-2, 8.0, 2, 5.0);
    const DecorrelationReport rep = lagrangian_decorrelation(tr, starts, 6.0);
    CHECK(rep.efold_time > 0.0);
    CHECK(rep.efold_time < 6.0);
    CHECK(rep.correlation.front() == doctest::Approx(1.0));
}

TEST_CASE("pathwise growth diagnostics on still, shear, and noisy flows") {
    // u = 0: both sides vanish
    const FrozenTrajectory still(SpectralVelocity(1), 0.05, 20);
    const C2GrowthReport r0 = c2_growth_diagnostics(still);
    CHECK(r0.lhs == 0.0);
    CHECK(r0.rhs == doctest::Approx(0.0));
    CHECK(r0.margin == doctest::Approx(0.0));

    // frozen shear, amplitude 2 over unit time: rhs = sup|grad u| = 2,
    // lhs = log opnorm([[1,0],[-2,1]]) = log(1+sqrt(2)) at the worst start
    const FrozenTrajectory sh = frozen(tfh::shear_field(2.0), 0.05, 20);
    const C2GrowthReport rs = c2_growth_diagnostics(sh);
    CHECK(rs.rhs == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(rs.lhs == doctest::Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-3));
    CHECK(rs.margin > 0.0);
    CHECK(rs.margin == doctest::Approx(rs.rhs - rs.lhs));

    // stochastic window: the pathwise inequality holds
    const StoredTrajectory tr = tfh::stochastic_trajectory(8, 1e-2, 1.0, 17, 4.0);
    const C2GrowthReport rn = c2_growth_diagnostics(tr);
    CHECK(rn.lhs <= rn.rhs + 1e-3);
    CHECK(rn.second_order_sup >= 0.0);
    CHECK(rn.sample_grid >= 4);
}

TEST_CASE("advect rejects a tracer clock that misses the segment start") {
    const FrozenTrajectory tr = frozen(tfh::shear_field(1.0), 0.1, 5);
    TracerState t{{1.0, 1.0}, 0.35};  // mid-segment
    CHECK_THROWS_AS(advect(t, FlowState{0, 0.0, tr.field(0)}, FlowState{1, 0.1, tr.field(1)}),
                    validation_error);
}

TEST_SUITE_END();
