#include "torusflow/transform.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace torusflow {

namespace {
// FFTW's planner mutates global state; executions on distinct buffers are fine.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

SpectralTransform::SpectralTransform(int grid_size) : m_(grid_size) {
    if (m_ < 4 || m_ % 2 != 0)
        throw validation_error("SpectralTransform: grid size must be even and >= 4");
    real_ = fftw_alloc_real(static_cast<size_t>(m_) * m_);
    auto* c = fftw_alloc_complex(static_cast<size_t>(m_) * (m_ / 2 + 1));
    cplx_ = c;
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_c2r_ = fftw_plan_dft_c2r_2d(m_, m_, c, real_, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
    plan_r2c_ = fftw_plan_dft_r2c_2d(m_, m_, real_, c, FFTW_ESTIMATE);
}

SpectralTransform::~SpectralTransform() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
    fftw_free(real_);
    fftw_free(static_cast<fftw_complex*>(cplx_));
}

// dense-square index helper
static inline int sq_index(int n, int k1, int k2) { return (k2 + n) * (2 * n + 1) + (k1 + n); }

void SpectralTransform::synth_scalar(const std::complex<double>* square, int cutoff,
                                     double* grid_out) {
    const int n = cutoff;
    if (m_ < 2 * n + 2)
        throw validation_error("synth_scalar: grid of size " + std::to_string(m_) +
                               " aliases modes up to cutoff " + std::to_string(n));
    auto* c = static_cast<fftw_complex*>(cplx_);
    const int hc = m_ / 2 + 1;
    std::memset(c, 0, sizeof(fftw_complex) * static_cast<size_t>(m_) * hc);
    // place k2 >= 0 half; the k2 < 0 half is implicit by conjugate symmetry
    for (int k2 = 0; k2 <= n; ++k2) {
        const int k1lo = -n;
        for (int k1 = k1lo; k1 <= n; ++k1) {
            std::complex<double> v = square[sq_index(n, k1, k2)];
            if (k2 == 0) {
                // the stored k2 = 0 column must itself be conjugate-symmetric
                // in k1; trust the caller and place what is given
                if (k1 < 0) continue;  // (−k1, 0) bins filled from (k1, 0) below
                if (k1 == 0) {
                    c[0][0] = v.real();
                    c[0][1] = v.imag();
                    continue;
                }
                const std::complex<double> w = square[sq_index(n, -k1, 0)];
                c[static_cast<size_t>(k1) * hc][0] = v.real();
                c[static_cast<size_t>(k1) * hc][1] = v.imag();
                c[static_cast<size_t>(m_ - k1) * hc][0] = w.real();
                c[static_cast<size_t>(m_ - k1) * hc][1] = w.imag();
                continue;
            }
            const int m0 = (k1 >= 0) ? k1 : k1 + m_;
            fftw_complex& slot = c[static_cast<size_t>(m0) * hc + k2];
            slot[0] = v.real();
            slot[1] = v.imag();
        }
    }
    fftw_execute(static_cast<fftw_plan>(plan_c2r_));
    std::memcpy(grid_out, real_, sizeof(double) * static_cast<size_t>(m_) * m_);
}

void SpectralTransform::analyze_scalar(const double* grid_in, int cutoff,
                                       std::complex<double>* square_out) {
    const int n = cutoff;
    if (m_ < 2 * n + 2)
        throw validation_error("analyze_scalar: grid of size " + std::to_string(m_) +
                               " aliases modes up to cutoff " + std::to_string(n));
    std::memcpy(real_, grid_in, sizeof(double) * static_cast<size_t>(m_) * m_);
    fftw_execute(static_cast<fftw_plan>(plan_r2c_));
    auto* c = static_cast<fftw_complex*>(cplx_);
    const int hc = m_ / 2 + 1;
    const double scale = 1.0 / (static_cast<double>(m_) * m_);
    for (int k2 = -n; k2 <= n; ++k2)
        for (int k1 = -n; k1 <= n; ++k1) {
            std::complex<double> v;
            if (k2 >= 0) {
                const int m0 = (k1 >= 0) ? k1 : k1 + m_;
                const fftw_complex& s = c[static_cast<size_t>(m0) * hc + k2];
                v = {s[0], s[1]};
            } else {
                const int m0 = (-k1 >= 0) ? -k1 : -k1 + m_;
                const fftw_complex& s = c[static_cast<size_t>(m0) * hc - k2];
                v = {s[0], -s[1]};
            }
            square_out[sq_index(n, k1, k2)] = v * scale;
        }
}

VelocityGrid grid_sample(const SpectralVelocity& f, int grid_size) {
    const int n = f.cutoff();
    if (grid_size < 2 * n + 2)
        throw validation_error("grid_sample: grid of size " + std::to_string(grid_size) +
                               " aliases modes up to cutoff " + std::to_string(n));
    SpectralTransform tr(grid_size);
    const ComplexModes m = to_complex(f);
    VelocityGrid g;
    g.grid_size = grid_size;
    g.u1.resize(static_cast<size_t>(grid_size) * grid_size);
    g.u2.resize(static_cast<size_t>(grid_size) * grid_size);
    tr.synth_scalar(m.c1.data(), n, g.u1.data());
    tr.synth_scalar(m.c2.data(), n, g.u2.data());
    return g;
}

GradientGrid gradient_grid_sample(const SpectralVelocity& f, int grid_size) {
    const int n = f.cutoff();
    if (grid_size < 2 * n + 2)
        throw validation_error("gradient_grid_sample: grid of size " + std::to_string(grid_size) +
                               " aliases modes up to cutoff " + std::to_string(n));
    SpectralTransform tr(grid_size);
    const ComplexModes m = to_complex(f);
    const int side = 2 * n + 1;
    std::vector<std::complex<double>> deriv(static_cast<size_t>(side) * side);
    GradientGrid g;
    g.grid_size = grid_size;
    const size_t cells = static_cast<size_t>(grid_size) * grid_size;
    g.g11.resize(cells);
    g.g12.resize(cells);
    g.g21.resize(cells);
    g.g22.resize(cells);
    const std::complex<double> iu(0.0, 1.0);
    auto synth_deriv = [&](const std::vector<std::complex<double>>& comp, bool by_x1,
                           double* out) {
        for (int k2 = -n; k2 <= n; ++k2)
            for (int k1 = -n; k1 <= n; ++k1) {
                const size_t idx = static_cast<size_t>(sq_index(n, k1, k2));
                deriv[idx] = iu * static_cast<double>(by_x1 ? k1 : k2) * comp[idx];
            }
        tr.synth_scalar(deriv.data(), n, out);
    };
    synth_deriv(m.c1, true, g.g11.data());
    synth_deriv(m.c1, false, g.g12.data());
    synth_deriv(m.c2, true, g.g21.data());
    synth_deriv(m.c2, false, g.g22.data());
    return g;
}

SpectralVelocity grid_fit(const VelocityGrid& g, int cutoff, double rel_tol) {
    const int m = g.grid_size;
    if (m < 2 * cutoff + 2)
        throw validation_error("grid_fit: grid of size " + std::to_string(m) +
                               " aliases modes up to cutoff " + std::to_string(cutoff));
    if (g.u1.size() != static_cast<size_t>(m) * m || g.u2.size() != g.u1.size())
        throw validation_error("grid_fit: component arrays do not match the grid size");
    SpectralTransform tr(m);
    ComplexModes cm(cutoff);
    tr.analyze_scalar(g.u1.data(), cutoff, cm.c1.data());
    tr.analyze_scalar(g.u2.data(), cutoff, cm.c2.data());
    return from_complex(cm, rel_tol);
}

} // namespace torusflow
