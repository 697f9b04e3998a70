#pragma once

// Passive tracers and their tangent dynamics along a velocity trajectory:
//
//   dx/dt = u_t(x),        dD/dt = grad u_t(x) D,    D(0) = I.
//
// Time integration is classical RK4 with the velocity linearly interpolated
// in time between the two bracketing spectral states of each segment; the
// interpolated field is polynomial in t inside a segment, so RK4 keeps its
// full order.  grad u is trace-free mode by mode, which keeps det D = 1 up
// to integration error (the tangent cocycle is unimodular).
//
// Two evaluation paths: exact basis summation (correctness mode, the default
// for cutoffs N <= 32) and cubic B-spline interpolation on an upsampled grid
// (performance mode, automatic above N = 32; see interp.hpp).

#include <cstdint>
#include <span>
#include <vector>

#include "torusflow/trajectory.hpp"

namespace torusflow {

struct TracerState {
    TorusPoint position;
    double time = 0.0;
};

struct TangentState {
    Mat2 matrix = Mat2::identity();
};

enum class EvalMode { automatic, exact, interpolated };

struct AdvectOptions {
    int substeps = 1;            // tracer RK4 steps per velocity segment
    EvalMode mode = EvalMode::automatic;
    int spline_factor = 8;       // interpolation grid scale (performance mode)
};

// One velocity segment [s0.time, s1.time].  The tracer's clock must sit at
// the segment start.
TracerState advect(const TracerState& t, const FlowState& s0, const FlowState& s1,
                   const AdvectOptions& opt = {});
void advect_tangent(TracerState& t, TangentState& d, const FlowState& s0,
                    const FlowState& s1, const AdvectOptions& opt = {});

// Flow map over [0, t] along the trajectory; t may end mid-segment.  When
// jacobian is non-null it receives d_x phi_t (no renormalization: fine for
// windows of tens of time units, overflow territory beyond that).
TorusPoint flow_map(const TrajectoryView& tr, TorusPoint x0, double t,
                    const AdvectOptions& opt = {}, Mat2* jacobian = nullptr);

// Central differences of the flow map: independent oracle for the tangent
// integration (never computed from it).
Mat2 finite_difference_jacobian(const TrajectoryView& tr, TorusPoint x0, double t,
                                double h, const AdvectOptions& opt = {});

// ---- batch advancement ---------------------------------------------------
//
// The certifier advances whole frontiers of cell centers in lockstep; the
// per-stage blended amplitude tables are shared across the batch, which is
// what makes exact-mode evaluation affordable.
struct OrbitProbe {
    TorusPoint x;
    Mat2 jacobian = Mat2::identity();
};

void advect_batch(const TrajectoryView& tr, std::int64_t seg_begin, std::int64_t seg_end,
                  std::span<OrbitProbe> probes, const AdvectOptions& opt = {},
                  bool with_tangent = true);

// ---- Lagrangian velocity decorrelation -------------------------------------
//
// C_L(s) = < u(x(t+s), t+s) . u(x(t), t) > averaged over tracers and t,
// normalized by C_L(0).  This is the clock on which the velocity seen by a
// moving particle forgets itself (eddy turnover); it is much shorter than the
// Eulerian field autocorrelation, which is pinned to the slow-mode relaxation
// time 1/(eps |k|^2).  The itinerary spacing of the certifier is chosen
// against this time.
struct DecorrelationReport {
    double efold_time = 0.0;          // first crossing of 1/e (interpolated)
    std::vector<double> lag;          // sampled lags, time units
    std::vector<double> correlation;  // C_L(lag) / C_L(0)
};

DecorrelationReport lagrangian_decorrelation(const TrajectoryView& tr,
                                             std::span<const TorusPoint> starts,
                                             double max_lag,
                                             const AdvectOptions& opt = {});

// ---- pathwise growth diagnostics ------------------------------------------
//
// Over one unit time window starting at the trajectory's origin:
//   lhs = log+ sup_x ||d_x phi_1||   (sampled on a start grid),
//   rhs = integral_0^1 sup_x ||grad u_t|| dt   (grid sup + local refinement,
//         trapezoid in t).
// The pathwise bound guarantees lhs <= rhs; `margin` = rhs - lhs.  The
// second-order difference quotient of the Jacobian is reported as a C^2
// growth proxy alongside.
struct C2GrowthReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double second_order_sup = 0.0;
    int sample_grid = 0;
};

C2GrowthReport c2_growth_diagnostics(const TrajectoryView& tr, int sample_grid = 8,
                                     const AdvectOptions& opt = {});

} // namespace torusflow
