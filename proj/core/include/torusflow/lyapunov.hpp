#pragma once

// Lyapunov spectrum of the tracer flow by QR re-orthonormalization: carry an
// orthonormal 2-frame along the tangent cocycle, QR-factorize every
// renormalization interval, and average log|diag R|.  The two sums estimate
// lambda_1 >= lambda_2; volume preservation of the flow forces
// lambda_1 + lambda_2 = 0, which is a free consistency check.
//
// Confidence intervals are batch means over the per-interval log increments:
// split the run into `batches` equal blocks and use the spread of the block
// averages (Student-t, default 95% / 20 blocks).
//
// Entropy: for this two-dimensional volume-preserving ergodic flow the
// entropy equals the sum of positive exponents (lambda_1^+ + lambda_2^+),
// estimated here by plugging in the spectrum estimates.

#include <cstdint>
#include <vector>

#include "torusflow/tracer.hpp"

namespace torusflow {

class LyapunovAccumulator {
public:
    explicit LyapunovAccumulator(double interval_time);

    // QR-step with the tangent matrix of one renormalization interval:
    // propagate the frame, orthonormalize, log the diagonal.  Throws
    // instability_error if the propagated frame degenerates.
    void push(const Mat2& interval_jacobian);

    std::int64_t intervals() const { return static_cast<std::int64_t>(log1_.size()); }
    double elapsed() const { return intervals() * interval_time_; }
    const Mat2& frame() const { return frame_; }
    const std::vector<double>& log_increments_1() const { return log1_; }
    const std::vector<double>& log_increments_2() const { return log2_; }

    double lambda1() const;
    double lambda2() const;

private:
    double interval_time_;
    Mat2 frame_ = Mat2::identity();
    std::vector<double> log1_, log2_;  // per-interval log|r_ii|
};

struct Spectrum {
    double lambda1 = 0.0, lambda2 = 0.0;
    double ci1 = 0.0, ci2 = 0.0;  // 95% half-widths
    double sum() const { return lambda1 + lambda2; }
    double duration = 0.0;
    int batches = 0;
};

// Reduce an accumulator to point estimates + batch-means CIs.
Spectrum estimate_spectrum(const LyapunovAccumulator& acc, int batches = 20);

// Sum of positive exponents.
double pesin_entropy(double lambda1, double lambda2);
inline double pesin_entropy(const Spectrum& s) { return pesin_entropy(s.lambda1, s.lambda2); }

// Streaming co-integration: run the velocity for `spinup`, then advance
// velocity + tracer + tangent together for `duration`, renormalizing every
// `renorm_steps` velocity steps.  Memory is O(1) in the horizon.
struct CoIntegration {
    double spinup = 50.0;
    double duration = 1000.0;
    TorusPoint x0{1.0, 1.0};
    int renorm_steps = 100;
    int batches = 20;
    int substeps = 1;
};

struct SpectrumRun {
    Spectrum spectrum;
    TorusPoint final_position;
    FlowState final_state;
    // per-renormalization-interval log|r_ii| series (for running estimates)
    std::vector<double> log1, log2;
    double interval_time = 0.0;
};

SpectrumRun run_spectrum(const SimParams& params, const ForcingSpec& forcing,
                         std::uint64_t seed, const CoIntegration& ci);

// Same estimator along a prerecorded trajectory (tests, replays).
Spectrum spectrum_along(const TrajectoryView& tr, TorusPoint x0, int renorm_steps = 100,
                        int batches = 20, const AdvectOptions& opt = {});

// ---- finite-time Oseledets directions -------------------------------------
//
// eu(t): leading singular direction of the window Jacobian D(t-W -> t)
// landing at t (power iteration on D D^T).  es(t): most contracted input
// direction of D(t -> t+W) (power iteration on (D^T D)^{-1}).  Both live in
// the tangent space at time t; `angle` is the angle between the two lines.
// converged = false flags isotropic windows (power iteration stalled).
struct DirectionFrame {
    Vec2 unstable{1.0, 0.0};
    Vec2 stable{0.0, 1.0};
    double angle = 0.0;
    bool converged = false;
};

DirectionFrame estimate_directions(const TrajectoryView& tr, TorusPoint x0, double t,
                                   double window, const AdvectOptions& opt = {},
                                   int max_power_iters = 200, double tol = 1e-12);

} // namespace torusflow
