#pragma once

// FFTW-backed bridge between dense spectral squares and M x M collocation
// grids on [0,2pi)^2.  Grid node (i,j) sits at x = (2pi i/M, 2pi j/M); the
// complex convention matches field.hpp: f(x) = sum_k fhat_k e^{i k.x}.
//
// Instances own their FFTW plans and buffers: cheap to reuse, not safe to
// share across threads.  Plan creation is internally serialized (FFTW's
// planner is not thread-safe).

#include <complex>
#include <vector>

#include "torusflow/field.hpp"

namespace torusflow {

class SpectralTransform {
public:
    explicit SpectralTransform(int grid_size);
    ~SpectralTransform();
    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;

    int grid_size() const { return m_; }

    // Evaluate a scalar spectrum (dense (2N+1)^2 square, e^{ik.x} convention)
    // on the grid.  Requires M >= 2N+2.
    void synth_scalar(const std::complex<double>* square, int cutoff, double* grid_out);

    // Project grid values onto modes |k|sup <= cutoff (includes the 1/M^2
    // normalization).  Requires M >= 2N+2 so the retained band is alias-free.
    void analyze_scalar(const double* grid_in, int cutoff, std::complex<double>* square_out);

private:
    int m_;
    double* real_;
    void* cplx_;  // fftw_complex*, kept opaque in the header
    void* plan_c2r_;
    void* plan_r2c_;
};

// Velocity sampled on an M x M grid, component-wise, row index = x1 node.
struct VelocityGrid {
    int grid_size = 0;
    std::vector<double> u1, u2;
};

// Pointwise velocity values at the grid nodes (exact for M >= 2N+2).
VelocityGrid grid_sample(const SpectralVelocity& f, int grid_size);

// Velocity-gradient entries on an M x M grid, g_ij = du_i/dx_j at the nodes
// (spectral differentiation, exact for M >= 2N+2).
struct GradientGrid {
    int grid_size = 0;
    std::vector<double> g11, g12, g21, g22;
};
GradientGrid gradient_grid_sample(const SpectralVelocity& f, int grid_size);

// Least-squares/collocation inverse of grid_sample: recovers the coefficient
// field of cutoff `cutoff` from grid values.  Throws validation_error when
// the grid undersamples the requested band (aliasing) or when the grid data
// is not a divergence-free band-limited field within rel_tol.
SpectralVelocity grid_fit(const VelocityGrid& g, int cutoff, double rel_tol = 1e-10);

} // namespace torusflow
