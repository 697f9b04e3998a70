#include "torusflow/interp.hpp"

#include <cmath>

#include "torusflow/transform.hpp"

namespace torusflow {

SplineField::SplineField(const SpectralVelocity& f, int factor) {
    if (factor < 1) throw validation_error("SplineField: factor must be >= 1");
    const int n = f.cutoff();
    int m = factor * 2 * n;
    if (m < 2 * n + 2) m = 2 * n + 2;
    if (m % 2) ++m;
    m_ = m;

    const ComplexModes cm = to_complex(f);
    const int side = 2 * n + 1;
    // per-axis inverse B-spline response: beta(k) = 2/3 + 1/3 cos(2 pi k / m)
    std::vector<double> inv_beta(n + 1);
    for (int k = 0; k <= n; ++k)
        inv_beta[k] = 1.0 / (2.0 / 3.0 + std::cos(kTwoPi * k / m) / 3.0);

    SpectralTransform tr(m);
    std::vector<std::complex<double>> sq(static_cast<size_t>(side) * side);
    const auto idx = [&](int k1, int k2) {
        return static_cast<size_t>(k2 + n) * side + (k1 + n);
    };
    const std::complex<double> iunit(0.0, 1.0);

    // derived scalar spectra: u1, u2, d1 u1, d2 u1, d1 u2
    for (int which = 0; which < 5; ++which) {
        for (int k2 = -n; k2 <= n; ++k2)
            for (int k1 = -n; k1 <= n; ++k1) {
                const size_t i = idx(k1, k2);
                std::complex<double> v;
                switch (which) {
                    case 0: v = cm.c1[i]; break;
                    case 1: v = cm.c2[i]; break;
                    case 2: v = iunit * double(k1) * cm.c1[i]; break;
                    case 3: v = iunit * double(k2) * cm.c1[i]; break;
                    case 4: v = iunit * double(k1) * cm.c2[i]; break;
                }
                sq[i] = v * (inv_beta[std::abs(k1)] * inv_beta[std::abs(k2)]);
            }
        c_[which].resize(static_cast<size_t>(m_) * m_);
        tr.synth_scalar(sq.data(), n, c_[which].data());
    }
}

namespace {
// cubic B-spline weights for fractional offset t in [0,1)
inline void bspline_weights(double t, double w[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = (1.0 - 3.0 * t + 3.0 * t2 - t3) / 6.0;
    w[1] = (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0;
    w[2] = (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0;
    w[3] = t3 / 6.0;
}
} // namespace

void SplineField::eval(TorusPoint x, Vec2& u, Mat2& grad) const {
    const double gx = wrap_coord(x.x1) * m_ / kTwoPi;
    const double gy = wrap_coord(x.x2) * m_ / kTwoPi;
    int i0 = static_cast<int>(gx), j0 = static_cast<int>(gy);
    double wx[4], wy[4];
    bspline_weights(gx - i0, wx);
    bspline_weights(gy - j0, wy);
    int rows[4], cols[4];
    for (int d = 0; d < 4; ++d) {
        rows[d] = (i0 - 1 + d + m_) % m_;
        cols[d] = (j0 - 1 + d + m_) % m_;
    }
    double acc[5] = {0, 0, 0, 0, 0};
    for (int a = 0; a < 4; ++a) {
        const size_t base = static_cast<size_t>(rows[a]) * m_;
        for (int b = 0; b < 4; ++b) {
            const double w = wx[a] * wy[b];
            const size_t i = base + cols[b];
            acc[0] += w * c_[0][i];
            acc[1] += w * c_[1][i];
            acc[2] += w * c_[2][i];
            acc[3] += w * c_[3][i];
            acc[4] += w * c_[4][i];
        }
    }
    u = {acc[0], acc[1]};
    grad = {acc[2], acc[3], acc[4], -acc[2]};  // trace-corrected
}

Vec2 SplineField::eval_velocity(TorusPoint x) const {
    Vec2 u;
    Mat2 g;
    eval(x, u, g);
    return u;
}

} // namespace torusflow
