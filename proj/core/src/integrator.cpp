#include "torusflow/integrator.hpp"

#include <cmath>

#include "torusflow/stats.hpp"

namespace torusflow {

void SimParams::validate(bool allow_inviscid) const {
    if (!(dt > 0.0)) throw validation_error("SimParams: dt must be positive");
    if (cutoff < 1) throw validation_error("SimParams: cutoff N must be >= 1");
    if (grid < 3 * cutoff)
        throw validation_error("SimParams: grid M must be >= 3N for dealiased products (M=" +
                               std::to_string(grid) + ", N=" + std::to_string(cutoff) + ")");
    if (grid % 2 != 0) throw validation_error("SimParams: grid M must be even");
    if (!(horizon > 0.0)) throw validation_error("SimParams: horizon T must be positive");
    if (epsilon < 0.0) throw validation_error("SimParams: epsilon must be nonnegative");
    if (epsilon == 0.0 && !allow_inviscid)
        throw validation_error("SimParams: epsilon = 0 is reserved for unforced "
                               "conservation diagnostics");
    if (!(blowup_threshold > 0.0))
        throw validation_error("SimParams: blow-up threshold must be positive");
}

namespace {
// phi^2(dt) = (1 - e^{-2 l dt}) / (2 l), continuous at l -> 0 where it is dt.
inline double ou_variance_factor(double l, double dt) {
    const double x = 2.0 * l * dt;
    if (x < 1e-8) return dt * (1.0 - 0.5 * x);  // series, avoids 0/0
    return -std::expm1(-x) / (2.0 * l);
}
} // namespace

NseIntegrator::NseIntegrator(const SimParams& params, const ForcingSpec& forcing)
    : p_(params), f_(forcing), tr_(params.grid) {
    p_.validate(true);
    const int n = p_.cutoff;
    if (f_.cutoff != n)
        throw validation_error("NseIntegrator: forcing cutoff does not match params");
    if (p_.epsilon == 0.0)
        for (double q : f_.q)
            if (q != 0.0)
                throw validation_error("NseIntegrator: inviscid mode requires zero forcing");

    const int side = 2 * n + 1;
    const size_t sq = static_cast<size_t>(side) * side;
    decay_full_.resize(sq);
    decay_half_.resize(sq);
    noise_gain_.resize(sq);
    for (int k2 = -n; k2 <= n; ++k2)
        for (int k1 = -n; k1 <= n; ++k1) {
            const size_t i = static_cast<size_t>(k2 + n) * side + (k1 + n);
            const double l = p_.epsilon * (double(k1) * k1 + double(k2) * k2);
            decay_full_[i] = std::exp(-l * p_.dt);
            decay_half_[i] = std::exp(-0.5 * l * p_.dt);
            noise_gain_[i] = f_.q[i] * std::sqrt(ou_variance_factor(l, p_.dt));
        }
    noise_gain_[sq / 2] = 0.0;  // origin slot

    b1_.resize(sq); b2_.resize(sq); b3_.resize(sq); b4_.resize(sq); stage_.resize(sq);
    w1_.resize(sq); w2_.resize(sq); ww_.resize(sq);
    const size_t g = static_cast<size_t>(p_.grid) * p_.grid;
    gu1_.resize(g); gu2_.resize(g); gw_.resize(g); gm1_.resize(g); gm2_.resize(g);
}

// B(u) = -P[omega u_perp], u_perp = (-u2, u1), in place over dense squares.
void NseIntegrator::apply_bilinear(const double* amp, double* out) {
    const int n = p_.cutoff;
    const int side = 2 * n + 1;

    // real coefficients -> complex components and vorticity
    std::fill(w1_.begin(), w1_.end(), std::complex<double>(0.0));
    std::fill(w2_.begin(), w2_.end(), std::complex<double>(0.0));
    std::fill(ww_.begin(), ww_.end(), std::complex<double>(0.0));
    for (int k2 = 0; k2 <= n; ++k2) {
        const int k1lo = (k2 == 0) ? 1 : -n;
        for (int k1 = k1lo; k1 <= n; ++k1) {
            const size_t ip = static_cast<size_t>(k2 + n) * side + (k1 + n);
            const size_t im = static_cast<size_t>(-k2 + n) * side + (-k1 + n);
            const double as = amp[ip], ac = amp[im];
            if (as == 0.0 && ac == 0.0) continue;
            const double nrm = std::sqrt(double(k1) * k1 + double(k2) * k2);
            const std::complex<double> c(-0.5 * ac, -0.5 * as);
            const std::complex<double> u1 = (k2 / nrm) * c;
            const std::complex<double> u2 = (-k1 / nrm) * c;
            w1_[ip] = u1;
            w2_[ip] = u2;
            w1_[im] = std::conj(u1);
            w2_[im] = std::conj(u2);
            // omega_k = i (k1 u2 - k2 u1)
            const std::complex<double> om =
                std::complex<double>(0.0, 1.0) * (double(k1) * u2 - double(k2) * u1);
            ww_[ip] = om;
            ww_[im] = std::conj(om);
        }
    }

    tr_.synth_scalar(w1_.data(), n, gu1_.data());
    tr_.synth_scalar(w2_.data(), n, gu2_.data());
    tr_.synth_scalar(ww_.data(), n, gw_.data());

    const size_t g = gu1_.size();
    for (size_t i = 0; i < g; ++i) {
        gm1_[i] = -gw_[i] * gu2_[i];  // (omega u_perp)_1
        gm2_[i] = gw_[i] * gu1_[i];   // (omega u_perp)_2
    }

    // analyze truncates to the retained band: the 2/3-style dealiasing
    tr_.analyze_scalar(gm1_.data(), n, w1_.data());
    tr_.analyze_scalar(gm2_.data(), n, w2_.data());

    // Leray-project, negate, convert back to real amplitudes
    for (int k2 = 0; k2 <= n; ++k2) {
        const int k1lo = (k2 == 0) ? 1 : -n;
        for (int k1 = k1lo; k1 <= n; ++k1) {
            const size_t ip = static_cast<size_t>(k2 + n) * side + (k1 + n);
            const size_t im = static_cast<size_t>(-k2 + n) * side + (-k1 + n);
            const double n2 = double(k1) * k1 + double(k2) * k2;
            const std::complex<double> m1 = w1_[ip], m2 = w2_[ip];
            const std::complex<double> along = (double(k1) * m1 + double(k2) * m2) / n2;
            const std::complex<double> p1 = -(m1 - double(k1) * along);
            const std::complex<double> p2 = -(m2 - double(k2) * along);
            // c = p . perp(k)/|k| = (-b_cos - i b_sin)/2
            const double nrm = std::sqrt(n2);
            const std::complex<double> c = (double(k2) * p1 - double(k1) * p2) / nrm;
            out[ip] = -2.0 * c.imag();
            out[im] = -2.0 * c.real();
        }
    }
    out[static_cast<size_t>(n) * side + n] = 0.0;
}

SpectralVelocity NseIntegrator::bilinear(const SpectralVelocity& u) {
    if (u.cutoff() != p_.cutoff)
        throw validation_error("bilinear: field cutoff does not match params");
    SpectralVelocity b(p_.cutoff);
    apply_bilinear(u.data(), b.data());
    return b;
}

void NseIntegrator::step_in_place(FlowState& s, const NoiseStream& noise) {
    if (s.field.cutoff() != p_.cutoff)
        throw validation_error("step: state cutoff does not match params");
    const size_t sq = decay_full_.size();
    double* a = s.field.data();
    const double dt = p_.dt;

    if (!p_.linear_only) {
        // Lawson IF-RK4: b_i = B at the four stage states
        apply_bilinear(a, b1_.data());
        for (size_t i = 0; i < sq; ++i)
            stage_[i] = decay_half_[i] * (a[i] + 0.5 * dt * b1_[i]);
        apply_bilinear(stage_.data(), b2_.data());
        for (size_t i = 0; i < sq; ++i)
            stage_[i] = decay_half_[i] * a[i] + 0.5 * dt * b2_[i];
        apply_bilinear(stage_.data(), b3_.data());
        for (size_t i = 0; i < sq; ++i)
            stage_[i] = decay_full_[i] * a[i] + dt * decay_half_[i] * b3_[i];
        apply_bilinear(stage_.data(), b4_.data());
        for (size_t i = 0; i < sq; ++i)
            a[i] = decay_full_[i] * a[i] +
                   dt / 6.0 *
                       (decay_full_[i] * b1_[i] +
                        2.0 * decay_half_[i] * (b2_[i] + b3_[i]) + b4_[i]);
    } else {
        for (size_t i = 0; i < sq; ++i) a[i] *= decay_full_[i];
    }

    // exact-variance OU noise update
    const int n = p_.cutoff;
    const int side = 2 * n + 1;
    for (int k2 = -n; k2 <= n; ++k2)
        for (int k1 = -n; k1 <= n; ++k1) {
            const size_t i = static_cast<size_t>(k2 + n) * side + (k1 + n);
            if (noise_gain_[i] != 0.0)
                a[i] += noise_gain_[i] *
                        counter_gaussian(noise.seed(), k1, k2, noise.origin() + s.step);
        }

    s.step += 1;
    s.time = s.step * dt;

    for (int k2 = -n; k2 <= n; ++k2)
        for (int k1 = -n; k1 <= n; ++k1) {
            const double v = a[static_cast<size_t>(k2 + n) * side + (k1 + n)];
            if (!std::isfinite(v) || std::fabs(v) > p_.blowup_threshold)
                throw instability_error(
                    "numerical instability at step " + std::to_string(s.step) +
                        " (t=" + std::to_string(s.time) + "): |a_(" + std::to_string(k1) +
                        "," + std::to_string(k2) + ")| = " + std::to_string(v) +
                        " exceeds " + std::to_string(p_.blowup_threshold),
                    s.step, k1, k2);
        }
}

SpectralVelocity bilinear_term(const SpectralVelocity& u, int grid) {
    SimParams p;
    p.cutoff = u.cutoff();
    p.grid = (grid > 0) ? grid : (3 * u.cutoff() + (3 * u.cutoff()) % 2);
    p.epsilon = 0.0;
    ForcingSpec f;
    f.cutoff = u.cutoff();
    f.q.assign(static_cast<size_t>(f.side()) * f.side(), 0.0);
    NseIntegrator integ(p, f);
    return integ.bilinear(u);
}

SimulationResult simulate(const SimParams& params, const ForcingSpec& forcing,
                          FlowState initial, const NoiseStream& noise, double duration,
                          int diag_stride,
                          const std::function<void(const FlowState&)>& on_step) {
    NseIntegrator integ(params, forcing);
    const auto steps = static_cast<std::int64_t>(std::llround(duration / params.dt));
    SimulationResult r{std::move(initial), {}};
    r.diagnostics.sobolev_s = forcing.sobolev_s;
    auto record = [&](const FlowState& s) {
        r.diagnostics.time.push_back(s.time);
        r.diagnostics.energy.push_back(s.field.energy());
        r.diagnostics.enstrophy.push_back(s.field.enstrophy());
        r.diagnostics.sobolev.push_back(s.field.sobolev_norm(forcing.sobolev_s));
    };
    if (diag_stride > 0) record(r.state);
    for (std::int64_t i = 0; i < steps; ++i) {
        integ.step_in_place(r.state, noise);
        if (diag_stride > 0 && r.state.step % diag_stride == 0) record(r.state);
        if (on_step) on_step(r.state);
    }
    return r;
}

StationarySample sample_stationary(const SimParams& params, const ForcingSpec& forcing,
                                   std::uint64_t seed, int count, double burn_in,
                                   double gap) {
    if (count < 1) throw validation_error("sample_stationary: count must be >= 1");
    if (!(burn_in > 0.0) || !(gap > 0.0))
        throw validation_error("sample_stationary: burn_in and gap must be positive");
    NseIntegrator integ(params, forcing);
    NoiseStream noise(seed, params.dt);
    FlowState s{0, 0.0, SpectralVelocity(params.cutoff)};

    StationarySample out;
    out.burn_in = burn_in;
    out.gap = gap;
    std::vector<double> energy_series;
    const auto burn_steps = static_cast<std::int64_t>(std::llround(burn_in / params.dt));
    const auto gap_steps = static_cast<std::int64_t>(std::llround(gap / params.dt));
    for (std::int64_t i = 0; i < burn_steps; ++i) {
        integ.step_in_place(s, noise);
        energy_series.push_back(s.field.energy());
    }
    out.draws.reserve(count);
    out.draws.push_back(s.field);
    for (int d = 1; d < count; ++d) {
        for (std::int64_t i = 0; i < gap_steps; ++i) {
            integ.step_in_place(s, noise);
            energy_series.push_back(s.field.energy());
        }
        out.draws.push_back(s.field);
    }
    out.energy_autocorr_time = integrated_autocorr_time(energy_series) * params.dt;
    return out;
}

OuCheckReport ou_check(const SimParams& params, const ForcingSpec& forcing,
                       std::uint64_t seed, std::int64_t steps,
                       std::int64_t burn_in_steps) {
    if (steps < 2) throw validation_error("ou_check: need at least 2 steps");
    if (burn_in_steps < 0) throw validation_error("ou_check: burn-in must be >= 0");
    SimParams p = params;
    p.linear_only = true;
    p.validate();
    NseIntegrator integ(p, forcing);
    NoiseStream noise(seed, p.dt);

    const int n = p.cutoff;
    FlowState st{0, 0.0, SpectralVelocity(n)};
    std::vector<OuModeStat> modes;
    modes.reserve(static_cast<size_t>(2 * n + 1) * (2 * n + 1));
    for (int k2 = -n; k2 <= n; ++k2)
        for (int k1 = -n; k1 <= n; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            const double q = forcing.q_at(k1, k2);
            if (q == 0.0) continue;
            OuModeStat ms;
            ms.k = {k1, k2};
            const double ksq = double(k1) * k1 + double(k2) * k2;
            ms.target_variance = q * q / (2.0 * p.epsilon * ksq);
            ms.lag_autocorr_target = std::exp(-p.epsilon * ksq * p.dt);
            // exact stationary draw (reserved counter slot -1: the stepping
            // stream only ever consumes step indices >= 0)
            st.field.set(k1, k2, std::sqrt(ms.target_variance) *
                                     noise.standard_normal(ms.k, -1));
            modes.push_back(ms);
        }

    for (std::int64_t i = 0; i < burn_in_steps; ++i) integ.step_in_place(st, noise);

    std::vector<double> prev(modes.size()), sum_inn2(modes.size(), 0.0),
        sum_a2(modes.size(), 0.0), sum_cross(modes.size(), 0.0), sum_prev2(modes.size(), 0.0);
    for (size_t m = 0; m < modes.size(); ++m)
        prev[m] = st.field.at(modes[m].k.k1, modes[m].k.k2);
    for (std::int64_t i = 0; i < steps; ++i) {
        integ.step_in_place(st, noise);
        for (size_t m = 0; m < modes.size(); ++m) {
            const double a = st.field.at(modes[m].k.k1, modes[m].k.k2);
            const double inn = a - modes[m].lag_autocorr_target * prev[m];
            sum_inn2[m] += inn * inn;
            sum_a2[m] += a * a;
            sum_cross[m] += a * prev[m];
            sum_prev2[m] += prev[m] * prev[m];
            prev[m] = a;
        }
    }

    OuCheckReport rep;
    rep.steps = steps;
    for (size_t m = 0; m < modes.size(); ++m) {
        OuModeStat& ms = modes[m];
        const double phi = ms.lag_autocorr_target;
        ms.innovation_variance = (sum_inn2[m] / double(steps)) / (1.0 - phi * phi);
        ms.naive_variance = sum_a2[m] / double(steps);
        ms.lag_autocorr = sum_prev2[m] > 0.0 ? sum_cross[m] / sum_prev2[m] : 0.0;
        const double rel = std::fabs(ms.innovation_variance / ms.target_variance - 1.0);
        if (rel > rep.worst_rel_dev) {
            rep.worst_rel_dev = rel;
            rep.worst_mode = ms.k;
        }
        rep.worst_naive_rel_dev =
            std::max(rep.worst_naive_rel_dev,
                     std::fabs(ms.naive_variance / ms.target_variance - 1.0));
    }
    rep.modes = std::move(modes);
    return rep;
}

} // namespace torusflow
