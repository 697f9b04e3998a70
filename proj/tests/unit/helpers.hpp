#pragma once

// Shared fixtures for the unit suites: deterministic random fields, canonical
// shear/cellular frozen flows, stochastic trajectory capture, a trajectory
// view with a shifted time origin, and scratch directories for file tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "torusflow/config.hpp"
#include "torusflow/field.hpp"
#include "torusflow/forcing.hpp"
#include "torusflow/integrator.hpp"
#include "torusflow/trajectory.hpp"

namespace tfh {

// Deterministic random field with (1+|k|^2)^(-decay/2) amplitude envelope;
// reuses the library's counter generator so tests need no extra RNG state.
inline torusflow::SpectralVelocity random_field(int cutoff, std::uint64_t seed,
                                                double decay = 2.0, double scale = 1.0) {
    torusflow::SpectralVelocity f(cutoff);
    for (int k2 = -cutoff; k2 <= cutoff; ++k2)
        for (int k1 = -cutoff; k1 <= cutoff; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            const double kk = double(k1) * k1 + double(k2) * k2;
            f.set(k1, k2, scale * std::pow(1.0 + kk, -0.5 * decay) *
                              torusflow::counter_gaussian(seed, k1, k2, 0));
        }
    return f;
}

// u = (0, -a sin x1): the single-mode shear with the exact orbit
// x1(t) = x1(0), x2(t) = x2(0) - a t sin x1(0).
inline torusflow::SpectralVelocity shear_field(double a) {
    torusflow::SpectralVelocity f(1);
    f.set(1, 0, a);
    return f;
}

// u = (b sin x2, -a sin x1): two-mode cellular flow (no closed-form orbit;
// used for convergence-order and direction tests).
inline torusflow::SpectralVelocity cellular_field(double a, double b) {
    torusflow::SpectralVelocity f(1);
    f.set(1, 0, a);
    f.set(0, 1, b);
    return f;
}

inline torusflow::SimParams sim_params(int cutoff, double dt, double epsilon = 0.1,
                                       std::uint64_t seed = 1) {
    torusflow::SimParams p;
    p.cutoff = cutoff;
    p.grid = torusflow::auto_grid(cutoff);
    p.dt = dt;
    p.epsilon = epsilon;
    p.seed = seed;
    return p;
}

// Burn in from rest, then record `duration` time units of the realization.
inline torusflow::StoredTrajectory stochastic_trajectory(int cutoff, double dt,
                                                         double duration,
                                                         std::uint64_t seed,
                                                         double burn = 5.0,
                                                         double epsilon = 0.1,
                                                         double amplitude = 1.0) {
    auto p = sim_params(cutoff, dt, epsilon, seed);
    auto f = torusflow::build_forcing(cutoff, 4.0, 5.5, 1, amplitude);
    torusflow::NoiseStream noise(seed, dt);
    torusflow::FlowState st{0, 0.0, torusflow::SpectralVelocity(cutoff)};
    if (burn > 0.0) st = torusflow::simulate(p, f, st, noise, burn, 0).state;
    return torusflow::record_trajectory(p, f, st, noise, duration);
}

// The same realization re-based so that time zero sits `offset` segments in.
class OffsetView final : public torusflow::TrajectoryView {
public:
    OffsetView(const torusflow::TrajectoryView& base, std::int64_t offset)
        : base_(base), off_(offset) {}
    double dt() const override { return base_.dt(); }
    std::int64_t segments() const override { return base_.segments() - off_; }
    const torusflow::SpectralVelocity& field(std::int64_t i) const override {
        return base_.field(i + off_);
    }

private:
    const torusflow::TrajectoryView& base_;
    std::int64_t off_;
};

// Fresh scratch directory (wiped if a previous run left it behind).
inline std::filesystem::path fresh_dir(const std::string& tag) {
    auto d = std::filesystem::temp_directory_path() / ("torusflow-test-" + tag);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace tfh
