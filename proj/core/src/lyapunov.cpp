#include "torusflow/lyapunov.hpp"

#include <cmath>

#include "torusflow/stats.hpp"

namespace torusflow {

LyapunovAccumulator::LyapunovAccumulator(double interval_time)
    : interval_time_(interval_time) {
    if (!(interval_time > 0.0))
        throw validation_error("LyapunovAccumulator: interval time must be positive");
}

void LyapunovAccumulator::push(const Mat2& interval_jacobian) {
    const Mat2 f = interval_jacobian * frame_;
    // Gram-Schmidt on the columns of f
    const double r11 = std::hypot(f.a, f.c);
    if (!(r11 > 0.0) || !std::isfinite(r11))
        throw instability_error("QR renormalization: degenerate first column", intervals(),
                                0, 0);
    const double q1x = f.a / r11, q1y = f.c / r11;
    const double r12 = q1x * f.b + q1y * f.d;
    const double vx = f.b - r12 * q1x, vy = f.d - r12 * q1y;
    const double r22 = std::hypot(vx, vy);
    if (!(r22 > 0.0) || !std::isfinite(r22))
        throw instability_error("QR renormalization: collapsed frame", intervals(), 0, 0);
    frame_ = {q1x, vx / r22, q1y, vy / r22};
    log1_.push_back(std::log(r11));
    log2_.push_back(std::log(r22));
}

double LyapunovAccumulator::lambda1() const {
    double s = 0.0;
    for (double v : log1_) s += v;
    return s / (interval_time_ * intervals());
}

double LyapunovAccumulator::lambda2() const {
    double s = 0.0;
    for (double v : log2_) s += v;
    return s / (interval_time_ * intervals());
}

Spectrum estimate_spectrum(const LyapunovAccumulator& acc, int batches) {
    if (acc.intervals() < 2 * batches)
        throw validation_error("estimate_spectrum: run too short for " +
                               std::to_string(batches) + " batches");
    Spectrum s;
    s.batches = batches;
    s.duration = acc.elapsed();
    const double per_time = acc.elapsed() / acc.intervals();
    const BatchCI c1 = batch_means_ci(acc.log_increments_1(), batches);
    const BatchCI c2 = batch_means_ci(acc.log_increments_2(), batches);
    s.lambda1 = c1.mean / per_time;
    s.lambda2 = c2.mean / per_time;
    s.ci1 = c1.half_width / per_time;
    s.ci2 = c2.half_width / per_time;
    return s;
}

double pesin_entropy(double lambda1, double lambda2) {
    return std::max(lambda1, 0.0) + std::max(lambda2, 0.0);
}

SpectrumRun run_spectrum(const SimParams& params, const ForcingSpec& forcing,
                         std::uint64_t seed, const CoIntegration& ci) {
    if (ci.renorm_steps < 1)
        throw validation_error("run_spectrum: renormalization interval must be >= 1 step");
    NseIntegrator integ(params, forcing);
    NoiseStream noise(seed, params.dt);
    FlowState cur{0, 0.0, SpectralVelocity(params.cutoff)};

    const auto spin_steps = static_cast<std::int64_t>(std::llround(ci.spinup / params.dt));
    for (std::int64_t i = 0; i < spin_steps; ++i) integ.step_in_place(cur, noise);

    LyapunovAccumulator acc(ci.renorm_steps * params.dt);
    TracerState tracer{ci.x0, cur.time};
    TangentState d;
    FlowState prev = cur;
    const auto total = static_cast<std::int64_t>(std::llround(ci.duration / params.dt));
    AdvectOptions opt;
    opt.substeps = ci.substeps;
    for (std::int64_t i = 1; i <= total; ++i) {
        integ.step_in_place(cur, noise);
        advect_tangent(tracer, d, prev, cur, opt);
        prev = cur;
        if (i % ci.renorm_steps == 0) {
            acc.push(d.matrix);
            d.matrix = Mat2::identity();
        }
    }
    SpectrumRun out{estimate_spectrum(acc, ci.batches), tracer.position, std::move(cur),
                    acc.log_increments_1(), acc.log_increments_2(),
                    ci.renorm_steps * params.dt};
    return out;
}

Spectrum spectrum_along(const TrajectoryView& tr, TorusPoint x0, int renorm_steps,
                        int batches, const AdvectOptions& opt) {
    if (renorm_steps < 1)
        throw validation_error("spectrum_along: renormalization interval must be >= 1 step");
    LyapunovAccumulator acc(renorm_steps * tr.dt());
    OrbitProbe probe{x0, Mat2::identity()};
    std::span<OrbitProbe> one(&probe, 1);
    std::int64_t s = 0;
    while (s + renorm_steps <= tr.segments()) {
        probe.jacobian = Mat2::identity();
        advect_batch(tr, s, s + renorm_steps, one, opt, true);
        acc.push(probe.jacobian);
        s += renorm_steps;
    }
    return estimate_spectrum(acc, batches);
}

namespace {
// leading eigenvector of a symmetric positive 2x2 by power iteration
bool power_leading(const Mat2& sym, int max_iters, double tol, Vec2& v_out) {
    Vec2 v{1.0, 0.0};
    // a second start in case the first is orthogonal to the leading direction
    for (int attempt = 0; attempt < 2; ++attempt) {
        for (int i = 0; i < max_iters; ++i) {
            Vec2 w = sym * v;
            const double n = w.norm();
            if (!(n > 0.0)) break;
            w = w * (1.0 / n);
            const double align = std::fabs(w.dot(v));
            v = w;
            if (1.0 - align < tol) {
                v_out = v;
                return true;
            }
        }
        v = {0.0, 1.0};
    }
    v_out = v;
    return false;
}
} // namespace

DirectionFrame estimate_directions(const TrajectoryView& tr, TorusPoint x0, double t,
                                   double window, const AdvectOptions& opt,
                                   int max_power_iters, double tol) {
    if (!(window > 0.0))
        throw validation_error("estimate_directions: window must be positive");
    if (t - window < -1e-12 || t + window > tr.duration() * (1.0 + 1e-12))
        throw validation_error("estimate_directions: window [t-W, t+W] leaves the trajectory");

    // backward-window Jacobian landing at t
    const TorusPoint x_back = flow_map(tr, x0, t - window, opt);
    Mat2 d_back;
    {
        const double dt = tr.dt();
        const auto s0 = static_cast<std::int64_t>(std::llround((t - window) / dt));
        const auto s1 = static_cast<std::int64_t>(std::llround(t / dt));
        OrbitProbe probe{x_back, Mat2::identity()};
        std::span<OrbitProbe> one(&probe, 1);
        advect_batch(tr, s0, s1, one, opt, true);
        d_back = probe.jacobian;
    }
    // forward-window Jacobian starting at t
    const TorusPoint x_mid = flow_map(tr, x0, t, opt);
    Mat2 d_fwd;
    {
        const double dt = tr.dt();
        const auto s0 = static_cast<std::int64_t>(std::llround(t / dt));
        const auto s1 = static_cast<std::int64_t>(std::llround((t + window) / dt));
        OrbitProbe probe{x_mid, Mat2::identity()};
        std::span<OrbitProbe> one(&probe, 1);
        advect_batch(tr, s0, s1, one, opt, true);
        d_fwd = probe.jacobian;
    }

    DirectionFrame frame;
    const Mat2 ddt = d_back * d_back.transpose();
    const Mat2 dtd_fwd = d_fwd.transpose() * d_fwd;
    Vec2 eu, es;
    const bool ok_u = power_leading(ddt, max_power_iters, tol, eu);
    const bool ok_s = power_leading(dtd_fwd.inverse(), max_power_iters, tol, es);
    frame.unstable = eu;
    frame.stable = es;
    frame.converged = ok_u && ok_s;
    double c = std::fabs(eu.dot(es));
    if (c > 1.0) c = 1.0;
    frame.angle = std::acos(c);
    return frame;
}

} // namespace torusflow
