#include "torusflow/tracer.hpp"

#include <cmath>
#include <memory>

#include "torusflow/interp.hpp"
#include "torusflow/transform.hpp"

namespace torusflow {

StoredTrajectory record_trajectory(const SimParams& params, const ForcingSpec& forcing,
                                   FlowState initial, const NoiseStream& noise,
                                   double duration, std::size_t max_bytes) {
    const auto steps = static_cast<std::int64_t>(std::llround(duration / params.dt));
    const std::size_t side = 2 * params.cutoff + 1;
    const std::size_t bytes = (steps + 1) * side * side * sizeof(double);
    if (bytes > max_bytes)
        throw validation_error("record_trajectory: " + std::to_string(steps + 1) +
                               " states of cutoff " + std::to_string(params.cutoff) +
                               " would need " + std::to_string(bytes >> 20) +
                               " MiB (limit " + std::to_string(max_bytes >> 20) + " MiB)");
    StoredTrajectory tr(params.dt);
    tr.reserve(steps + 1);
    tr.append(initial.field);
    simulate(params, forcing, std::move(initial), noise, duration, 0,
             [&tr](const FlowState& s) { tr.append(s.field); });
    return tr;
}

namespace {

bool use_exact(const AdvectOptions& opt, int cutoff) {
    switch (opt.mode) {
        case EvalMode::exact: return true;
        case EvalMode::interpolated: return false;
        case EvalMode::automatic: return cutoff <= 32;
    }
    return true;
}

// RK4 over one substep of size h.  Fields at the three stage times are
// provided by the evaluator callback eval(stage, x, u, g): stage 0 = substep
// start, 1 = midpoint, 2 = end.
template <class Eval>
inline void rk4_substep(const Eval& eval, double h, TorusPoint& x, Mat2* d,
                        bool with_tangent) {
    Vec2 u1, u2, u3, u4;
    Mat2 g;
    Mat2 kd1, kd2, kd3, kd4;
    const Mat2 d0 = d ? *d : Mat2::identity();

    eval(0, x, u1, g);
    if (with_tangent) kd1 = g * d0;
    TorusPoint xa{x.x1 + 0.5 * h * u1.x, x.x2 + 0.5 * h * u1.y};
    eval(1, xa, u2, g);
    if (with_tangent) kd2 = g * (d0 + 0.5 * h * kd1);
    TorusPoint xb{x.x1 + 0.5 * h * u2.x, x.x2 + 0.5 * h * u2.y};
    eval(1, xb, u3, g);
    if (with_tangent) kd3 = g * (d0 + 0.5 * h * kd2);
    TorusPoint xc{x.x1 + h * u3.x, x.x2 + h * u3.y};
    eval(2, xc, u4, g);
    if (with_tangent) kd4 = g * (d0 + h * kd3);

    x = TorusPoint::wrapped(x.x1 + h / 6.0 * (u1.x + 2.0 * (u2.x + u3.x) + u4.x),
                            x.x2 + h / 6.0 * (u1.y + 2.0 * (u2.y + u3.y) + u4.y));
    if (with_tangent && d)
        *d = d0 + (h / 6.0) * (kd1 + 2.0 * (kd2 + kd3) + kd4);
}

// Exact-mode stage tables: blended amplitude squares at the three stage
// times of the current substep, shared across a batch.
struct StageTables {
    int cutoff = 0;
    std::vector<double> amp[3];

    void resize(int n) {
        cutoff = n;
        const size_t sq = static_cast<size_t>(2 * n + 1) * (2 * n + 1);
        for (auto& a : amp) a.resize(sq);
    }
    // theta0/theta1: fractional times of substep start/end inside the segment
    void blend(const double* a0, const double* a1, double theta0, double theta1) {
        const double thm = 0.5 * (theta0 + theta1);
        const size_t sq = amp[0].size();
        for (size_t i = 0; i < sq; ++i) {
            const double lo = a0[i], hi = a1[i], dl = hi - lo;
            amp[0][i] = lo + theta0 * dl;
            amp[1][i] = lo + thm * dl;
            amp[2][i] = lo + theta1 * dl;
        }
    }
};

// Interpolated-mode stage evaluation: two spline fields blended in time.
struct SplinePair {
    std::unique_ptr<SplineField> lo, hi;
    double theta[3] = {0.0, 0.5, 1.0};

    void eval(int stage, TorusPoint x, Vec2& u, Mat2& g) const {
        Vec2 ua, ub;
        Mat2 ga, gb;
        lo->eval(x, ua, ga);
        hi->eval(x, ub, gb);
        const double th = theta[stage];
        u = ua * (1.0 - th) + ub * th;
        g = ga * (1.0 - th) + gb * th;
    }
};

// Advance probes through one segment (duration seg_dt, possibly partial),
// exact mode, with the stage tables shared across the batch.
void segment_exact(const double* a0, const double* a1, int cutoff, double full_dt,
                   double advance_dt, int substeps, std::span<OrbitProbe> probes,
                   bool with_tangent, StageTables& tables) {
    const double h = advance_dt / substeps;
    for (int m = 0; m < substeps; ++m) {
        const double t0 = m * h / full_dt, t1 = (m + 1) * h / full_dt;
        tables.blend(a0, a1, t0, t1);
        const auto eval = [&](int stage, TorusPoint x, Vec2& u, Mat2& g) {
            eval_amplitudes(tables.amp[stage].data(), cutoff, x, u, g);
        };
        for (auto& p : probes)
            rk4_substep(eval, h, p.x, with_tangent ? &p.jacobian : nullptr, with_tangent);
    }
}

void segment_interp(const SplinePair& pair, double full_dt, double advance_dt,
                    double start_theta, int substeps, std::span<OrbitProbe> probes,
                    bool with_tangent) {
    const double h = advance_dt / substeps;
    for (int m = 0; m < substeps; ++m) {
        const double t0 = start_theta + m * h / full_dt;
        const double t1 = start_theta + (m + 1) * h / full_dt;
        const auto eval = [&](int stage, TorusPoint x, Vec2& u, Mat2& g) {
            const double th = (stage == 0) ? t0 : (stage == 1 ? 0.5 * (t0 + t1) : t1);
            Vec2 ua, ub;
            Mat2 ga, gb;
            pair.lo->eval(x, ua, ga);
            pair.hi->eval(x, ub, gb);
            u = ua * (1.0 - th) + ub * th;
            g = ga * (1.0 - th) + gb * th;
        };
        for (auto& p : probes)
            rk4_substep(eval, h, p.x, with_tangent ? &p.jacobian : nullptr, with_tangent);
    }
}

} // namespace

TracerState advect(const TracerState& t, const FlowState& s0, const FlowState& s1,
                   const AdvectOptions& opt) {
    TracerState out = t;
    TangentState dummy;
    advect_tangent(out, dummy, s0, s1, opt);
    return out;
}

void advect_tangent(TracerState& t, TangentState& d, const FlowState& s0,
                    const FlowState& s1, const AdvectOptions& opt) {
    const double dt = s1.time - s0.time;
    if (!(dt > 0.0))
        throw validation_error("advect: segment states must be in increasing time order");
    if (std::fabs(t.time - s0.time) > 1e-9 * std::max(1.0, std::fabs(s0.time)))
        throw validation_error("advect: tracer clock does not match the segment start");
    if (opt.substeps < 1) throw validation_error("advect: substeps must be >= 1");
    const int n = s0.field.cutoff();
    if (s1.field.cutoff() != n)
        throw validation_error("advect: segment states have mismatched cutoffs");

    OrbitProbe probe{t.position, d.matrix};
    std::span<OrbitProbe> one(&probe, 1);
    if (use_exact(opt, n)) {
        StageTables tables;
        tables.resize(n);
        segment_exact(s0.field.data(), s1.field.data(), n, dt, dt, opt.substeps, one,
                      true, tables);
    } else {
        SplinePair pair;
        pair.lo = std::make_unique<SplineField>(s0.field, opt.spline_factor);
        pair.hi = std::make_unique<SplineField>(s1.field, opt.spline_factor);
        segment_interp(pair, dt, dt, 0.0, opt.substeps, one, true);
    }
    t.position = probe.x;
    t.time = s1.time;
    d.matrix = probe.jacobian;
}

void advect_batch(const TrajectoryView& tr, std::int64_t seg_begin, std::int64_t seg_end,
                  std::span<OrbitProbe> probes, const AdvectOptions& opt,
                  bool with_tangent) {
    if (seg_begin < 0 || seg_end > tr.segments() || seg_begin > seg_end)
        throw validation_error("advect_batch: segment range outside the trajectory");
    if (opt.substeps < 1) throw validation_error("advect_batch: substeps must be >= 1");
    const int n = tr.cutoff();
    const double dt = tr.dt();
    if (use_exact(opt, n)) {
        StageTables tables;
        tables.resize(n);
        for (std::int64_t s = seg_begin; s < seg_end; ++s)
            segment_exact(tr.field(s).data(), tr.field(s + 1).data(), n, dt, dt,
                          opt.substeps, probes, with_tangent, tables);
    } else {
        // rebuild the trailing spline once per segment, reuse the leading one
        SplinePair pair;
        pair.lo = std::make_unique<SplineField>(tr.field(seg_begin), opt.spline_factor);
        for (std::int64_t s = seg_begin; s < seg_end; ++s) {
            pair.hi = std::make_unique<SplineField>(tr.field(s + 1), opt.spline_factor);
            segment_interp(pair, dt, dt, 0.0, opt.substeps, probes, with_tangent);
            pair.lo = std::move(pair.hi);
        }
    }
}

TorusPoint flow_map(const TrajectoryView& tr, TorusPoint x0, double t,
                    const AdvectOptions& opt, Mat2* jacobian) {
    const double dt = tr.dt();
    if (t < 0.0 || t > tr.duration() * (1.0 + 1e-12))
        throw validation_error("flow_map: time " + std::to_string(t) +
                               " outside the trajectory span");
    auto full = static_cast<std::int64_t>(std::floor(t / dt + 1e-9));
    if (full > tr.segments()) full = tr.segments();
    const double rem = t - full * dt;

    OrbitProbe probe{x0, Mat2::identity()};
    std::span<OrbitProbe> one(&probe, 1);
    advect_batch(tr, 0, full, one, opt, jacobian != nullptr);
    if (rem > 1e-9 * std::max(1.0, t)) {
        // partial segment: advance to fraction rem/dt of segment `full`
        const int n = tr.cutoff();
        if (use_exact(opt, n)) {
            StageTables tables;
            tables.resize(n);
            segment_exact(tr.field(full).data(), tr.field(full + 1).data(), n, dt, rem,
                          opt.substeps, one, jacobian != nullptr, tables);
        } else {
            SplinePair pair;
            pair.lo = std::make_unique<SplineField>(tr.field(full), opt.spline_factor);
            pair.hi = std::make_unique<SplineField>(tr.field(full + 1), opt.spline_factor);
            segment_interp(pair, dt, rem, 0.0, opt.substeps, one, jacobian != nullptr);
        }
    }
    if (jacobian) *jacobian = probe.jacobian;
    return probe.x;
}

Mat2 finite_difference_jacobian(const TrajectoryView& tr, TorusPoint x0, double t,
                                double h, const AdvectOptions& opt) {
    if (!(h > 0.0)) throw validation_error("finite_difference_jacobian: h must be positive");
    const TorusPoint xp1 = flow_map(tr, TorusPoint::wrapped(x0.x1 + h, x0.x2), t, opt);
    const TorusPoint xm1 = flow_map(tr, TorusPoint::wrapped(x0.x1 - h, x0.x2), t, opt);
    const TorusPoint xp2 = flow_map(tr, TorusPoint::wrapped(x0.x1, x0.x2 + h), t, opt);
    const TorusPoint xm2 = flow_map(tr, TorusPoint::wrapped(x0.x1, x0.x2 - h), t, opt);
    const Vec2 d1 = torus_delta(xp1, xm1);
    const Vec2 d2 = torus_delta(xp2, xm2);
    return {d1.x / (2.0 * h), d2.x / (2.0 * h),
            d1.y / (2.0 * h), d2.y / (2.0 * h)};
}

namespace {
// sup of ||grad u|| over the torus for one spectral state: dense grid scan
// plus a local pattern-search refinement around the best node.
double sup_gradient_norm(const SpectralVelocity& f) {
    const int n = f.cutoff();
    const int m = std::max(4 * n, 32);
    const GradientGrid gg = gradient_grid_sample(f, m);
    double best = -1.0;
    TorusPoint argmax;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const size_t idx = static_cast<size_t>(i) * m + j;
            const Mat2 g{gg.g11[idx], gg.g12[idx], gg.g21[idx], gg.g22[idx]};
            const double v = g.opnorm();
            if (v > best) {
                best = v;
                argmax = {i * kTwoPi / m, j * kTwoPi / m};
            }
        }
    // pattern search: shrink a step from one grid cell to ~1e-6
    double step = kTwoPi / m;
    TorusPoint x = argmax;
    while (step > 1e-6) {
        bool improved = false;
        for (auto [dx, dy] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
            const TorusPoint y = TorusPoint::wrapped(x.x1 + dx, x.x2 + dy);
            const double v = f.gradient(y).opnorm();
            if (v > best) {
                best = v;
                x = y;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}
} // namespace

DecorrelationReport lagrangian_decorrelation(const TrajectoryView& tr,
                                             std::span<const TorusPoint> starts,
                                             double max_lag, const AdvectOptions& opt) {
    if (starts.empty())
        throw validation_error("lagrangian_decorrelation: need at least one tracer");
    const double dt = tr.dt();
    const auto span_segs = tr.segments();
    auto max_lag_segs = static_cast<std::int64_t>(std::llround(max_lag / dt));
    if (max_lag_segs < 1 || max_lag_segs >= span_segs)
        throw validation_error("lagrangian_decorrelation: max_lag must lie in (0, duration)");

    // velocity samples along each tracer, one per stored state
    std::vector<std::vector<Vec2>> u(starts.size());
    for (size_t t = 0; t < starts.size(); ++t) {
        u[t].reserve(span_segs + 1);
        u[t].push_back(tr.field(0).evaluate(starts[t]));
        TracerState tracer{starts[t], 0.0};
        for (std::int64_t s = 0; s < span_segs; ++s) {
            const FlowState s0{s, s * dt, tr.field(s)};
            const FlowState s1{s + 1, (s + 1) * dt, tr.field(s + 1)};
            tracer = advect(tracer, s0, s1, opt);
            u[t].push_back(tr.field(s + 1).evaluate(tracer.position));
        }
    }

    double c0 = 0.0;
    std::int64_t n0 = 0;
    for (const auto& series : u)
        for (const Vec2& v : series) {
            c0 += v.dot(v);
            ++n0;
        }
    c0 /= double(n0);

    DecorrelationReport rep;
    const int points = 24;
    const double kInvE = 0.36787944117144233;
    double prev_lag = 0.0, prev_corr = 1.0;
    rep.efold_time = max_lag;  // fallback: never crossed within max_lag
    bool crossed = false;
    for (int p = 1; p <= points; ++p) {
        const auto lag = static_cast<std::int64_t>(
            std::llround(double(p) / points * double(max_lag_segs)));
        if (lag < 1 || (p > 1 && lag * dt <= rep.lag.back())) continue;
        double c = 0.0;
        std::int64_t n = 0;
        for (const auto& series : u)
            for (size_t m = 0; m + lag < series.size(); ++m) {
                c += series[m].dot(series[m + lag]);
                ++n;
            }
        c /= double(n) * c0;
        rep.lag.push_back(lag * dt);
        rep.correlation.push_back(c);
        if (!crossed && c < kInvE) {
            rep.efold_time =
                prev_lag + (prev_corr - kInvE) / (prev_corr - c) * (lag * dt - prev_lag);
            crossed = true;
        }
        prev_lag = lag * dt;
        prev_corr = c;
    }
    return rep;
}

C2GrowthReport c2_growth_diagnostics(const TrajectoryView& tr, int sample_grid,
                                     const AdvectOptions& opt) {
    const double dt = tr.dt();
    const auto unit_segments = static_cast<std::int64_t>(std::llround(1.0 / dt));
    if (unit_segments > tr.segments())
        throw validation_error("c2_growth_diagnostics: trajectory shorter than one unit window");
    if (sample_grid < 2)
        throw validation_error("c2_growth_diagnostics: sample grid must be >= 2");

    C2GrowthReport rep;
    rep.sample_grid = sample_grid;

    // lhs: sup over sampled starts of log+ ||d_x phi_1||, via batched tangents
    const double fd_h = 1e-5;
    std::vector<OrbitProbe> probes;
    probes.reserve(static_cast<size_t>(sample_grid) * sample_grid * 5);
    for (int i = 0; i < sample_grid; ++i)
        for (int j = 0; j < sample_grid; ++j) {
            const TorusPoint x{i * kTwoPi / sample_grid, j * kTwoPi / sample_grid};
            probes.push_back({x, Mat2::identity()});
            // displaced starts for the second-order difference proxy
            probes.push_back({TorusPoint::wrapped(x.x1 + fd_h, x.x2), Mat2::identity()});
            probes.push_back({TorusPoint::wrapped(x.x1 - fd_h, x.x2), Mat2::identity()});
            probes.push_back({TorusPoint::wrapped(x.x1, x.x2 + fd_h), Mat2::identity()});
            probes.push_back({TorusPoint::wrapped(x.x1, x.x2 - fd_h), Mat2::identity()});
        }
    advect_batch(tr, 0, unit_segments, probes, opt, true);

    double sup_norm = 0.0, sup_second = 0.0;
    for (size_t p = 0; p < probes.size(); p += 5) {
        sup_norm = std::max(sup_norm, probes[p].jacobian.opnorm());
        const Mat2 d1 = (probes[p + 1].jacobian - probes[p + 2].jacobian) * (0.5 / fd_h);
        const Mat2 d2 = (probes[p + 3].jacobian - probes[p + 4].jacobian) * (0.5 / fd_h);
        sup_second = std::max({sup_second, d1.opnorm(), d2.opnorm()});
    }
    rep.lhs = std::max(0.0, std::log(sup_norm));
    rep.second_order_sup = sup_second;

    // rhs: trapezoid of sup ||grad u_t||
    double integral = 0.0;
    double prev = sup_gradient_norm(tr.field(0));
    for (std::int64_t s = 1; s <= unit_segments; ++s) {
        const double cur = sup_gradient_norm(tr.field(s));
        integral += 0.5 * dt * (prev + cur);
        prev = cur;
    }
    rep.rhs = integral;
    rep.margin = rep.rhs - rep.lhs;
    return rep;
}

} // namespace torusflow
