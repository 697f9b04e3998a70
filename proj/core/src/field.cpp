#include "torusflow/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace torusflow {

Vec2 basis_eval(WaveIndex k, TorusPoint x) {
    if (is_zero(k))
        throw validation_error("basis_eval: wave index (0,0) is not a basis element");
    const double phase = k.k1 * x.x1 + k.k2 * x.x2;
    const double amp = in_zplus(k) ? std::sin(phase) : std::cos(phase);
    return unit_perp(k) * amp;
}

SpectralVelocity::SpectralVelocity(int cutoff) : n_(cutoff) {
    if (cutoff < 1)
        throw validation_error("SpectralVelocity: cutoff must be >= 1");
    amp_.assign(static_cast<size_t>(side()) * side(), 0.0);
}

double SpectralVelocity::at(int k1, int k2) const {
    if (std::abs(k1) > n_ || std::abs(k2) > n_)
        throw validation_error("SpectralVelocity::at: wave index outside cutoff box");
    return amp_[index_of(k1, k2)];
}

void SpectralVelocity::set(int k1, int k2, double a) {
    if (std::abs(k1) > n_ || std::abs(k2) > n_)
        throw validation_error("SpectralVelocity::set: wave index outside cutoff box");
    if (k1 == 0 && k2 == 0)
        throw validation_error("SpectralVelocity::set: the (0,0) slot is not a mode");
    amp_[index_of(k1, k2)] = a;
}

double SpectralVelocity::energy() const {
    double e = 0.0;
    for (double a : amp_) e += a * a;
    return 0.5 * e;
}

double SpectralVelocity::enstrophy() const {
    double z = 0.0;
    for (int k2 = -n_; k2 <= n_; ++k2)
        for (int k1 = -n_; k1 <= n_; ++k1) {
            const double a = amp_[index_of(k1, k2)];
            z += (double(k1) * k1 + double(k2) * k2) * a * a;
        }
    return 0.5 * z;
}

double SpectralVelocity::sobolev_norm(double s) const {
    double v = 0.0;
    for (int k2 = -n_; k2 <= n_; ++k2)
        for (int k1 = -n_; k1 <= n_; ++k1) {
            const double a = amp_[index_of(k1, k2)];
            if (a == 0.0) continue;
            const double w = 1.0 + double(k1) * k1 + double(k2) * k2;
            v += std::pow(w, s) * a * a;
        }
    return std::sqrt(v);
}

// Shared summation core.  Pairs the sine mode a_k (k in Zplus) with the
// cosine mode a_{-k}: both contribute along p = perp(k)/|k| with the same
// phase k.x, so each pair costs one sin/cos.
//   u    += (a_k sin - a_{-k} cos) p
//   grad += (a_k cos + a_{-k} sin) p (x) k        [outer product p k^T]
namespace {

template <bool WantU, bool WantG>
inline void sum_modes(const double* amp, int n, TorusPoint x, Vec2* u, Mat2* g) {
    const int side = 2 * n + 1;
    if (WantU) *u = {};
    if (WantG) *g = {};
    // iterate k over Zplus within the box: k2 = 0 row (k1 > 0), then k2 > 0
    for (int k2 = 0; k2 <= n; ++k2) {
        const int k1lo = (k2 == 0) ? 1 : -n;
        // phase recurrences along k1 for fixed k2
        const double c1 = std::cos(x.x1), s1 = std::sin(x.x1);
        double ph0 = k1lo * x.x1 + k2 * x.x2;
        double cp = std::cos(ph0), sp = std::sin(ph0);
        for (int k1 = k1lo; k1 <= n; ++k1) {
            const double as = amp[(k2 + n) * side + (k1 + n)];      // sine amp  a_k
            const double ac = amp[(-k2 + n) * side + (-k1 + n)];    // cosine amp a_{-k}
            if (as != 0.0 || ac != 0.0) {
                const double nrm = std::sqrt(double(k1) * k1 + double(k2) * k2);
                const double px = k2 / nrm, py = -k1 / nrm;
                if (WantU) {
                    const double w = as * sp - ac * cp;
                    u->x += w * px;
                    u->y += w * py;
                }
                if (WantG) {
                    const double v = as * cp + ac * sp;
                    g->a += v * px * k1;
                    g->b += v * px * k2;
                    g->c += v * py * k1;
                    g->d += v * py * k2;
                }
            }
            // advance phase by x1
            const double cn = cp * c1 - sp * s1;
            sp = sp * c1 + cp * s1;
            cp = cn;
        }
    }
}

} // namespace

void eval_amplitudes(const double* amp, int cutoff, TorusPoint x, Vec2& u, Mat2& grad) {
    sum_modes<true, true>(amp, cutoff, x, &u, &grad);
}

Vec2 eval_amplitudes_velocity(const double* amp, int cutoff, TorusPoint x) {
    Vec2 u;
    sum_modes<true, false>(amp, cutoff, x, &u, nullptr);
    return u;
}

Vec2 SpectralVelocity::evaluate(TorusPoint x) const {
    Vec2 u;
    sum_modes<true, false>(amp_.data(), n_, x, &u, nullptr);
    return u;
}

Mat2 SpectralVelocity::gradient(TorusPoint x) const {
    Mat2 g;
    sum_modes<false, true>(amp_.data(), n_, x, nullptr, &g);
    return g;
}

void SpectralVelocity::evaluate_with_gradient(TorusPoint x, Vec2& u, Mat2& grad) const {
    sum_modes<true, true>(amp_.data(), n_, x, &u, &grad);
}

ComplexModes to_complex(const SpectralVelocity& f) {
    const int n = f.cutoff();
    ComplexModes m(n);
    for (int k2 = 0; k2 <= n; ++k2) {
        const int k1lo = (k2 == 0) ? 1 : -n;
        for (int k1 = k1lo; k1 <= n; ++k1) {
            const double as = f.at(k1, k2);
            const double ac = f.at(-k1, -k2);
            if (as == 0.0 && ac == 0.0) continue;
            const Vec2 p = unit_perp({k1, k2});
            const std::complex<double> c(-0.5 * ac, -0.5 * as);
            const int ip = m.index_of(k1, k2);
            const int im = m.index_of(-k1, -k2);
            m.c1[ip] = p.x * c;
            m.c2[ip] = p.y * c;
            m.c1[im] = std::conj(m.c1[ip]);
            m.c2[im] = std::conj(m.c2[ip]);
        }
    }
    return m;
}

SpectralVelocity from_complex(const ComplexModes& m, double rel_tol) {
    const int n = m.cutoff;
    SpectralVelocity f(n);
    // field scale for the relative tolerance
    double scale = 0.0;
    for (size_t i = 0; i < m.c1.size(); ++i)
        scale = std::max({scale, std::abs(m.c1[i]), std::abs(m.c2[i])});
    const double tol = rel_tol * std::max(scale, 1e-300);

    const int io = m.index_of(0, 0);
    if (std::abs(m.c1[io]) > tol || std::abs(m.c2[io]) > tol)
        throw validation_error("from_complex: nonzero mean mode");

    for (int k2 = 0; k2 <= n; ++k2) {
        const int k1lo = (k2 == 0) ? 1 : -n;
        for (int k1 = k1lo; k1 <= n; ++k1) {
            const int ip = m.index_of(k1, k2);
            const int im = m.index_of(-k1, -k2);
            const std::complex<double> up1 = m.c1[ip], up2 = m.c2[ip];
            if (std::abs(up1 - std::conj(m.c1[im])) > tol ||
                std::abs(up2 - std::conj(m.c2[im])) > tol)
                throw validation_error("from_complex: input is not conjugate-symmetric");
            // component along k must vanish (incompressibility)
            const std::complex<double> along = double(k1) * up1 + double(k2) * up2;
            if (std::abs(along) > tol * wave_norm({k1, k2}))
                throw validation_error("from_complex: input is not divergence-free");
            const Vec2 p = unit_perp({k1, k2});
            const std::complex<double> c = p.x * up1 + p.y * up2;  // = (-ac - i as)/2
            const double as = -2.0 * c.imag();
            const double ac = -2.0 * c.real();
            if (as != 0.0) f.set(k1, k2, as);
            if (ac != 0.0) f.set(-k1, -k2, ac);
        }
    }
    return f;
}

void save_field(std::ostream& os, const SpectralVelocity& f) {
    const int n = f.cutoff();
    char line[96];
    os << "N=" << n << "\n";
    for (int k2 = -n; k2 <= n; ++k2)
        for (int k1 = -n; k1 <= n; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            std::snprintf(line, sizeof line, "%d %d %.17g\n", k1, k2, f.at(k1, k2));
            os << line;
        }
}

SpectralVelocity load_field(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("N=", 0) != 0)
        throw validation_error("load_field: missing N=<cutoff> header");
    int n = 0;
    try {
        n = std::stoi(header.substr(2));
    } catch (const std::exception&) {
        throw validation_error("load_field: unparsable cutoff in header '" + header + "'");
    }
    if (n < 1) throw validation_error("load_field: cutoff must be >= 1");
    SpectralVelocity f(n);
    std::string line;
    // read exactly one block (so several fields can sit in one stream)
    long expected = static_cast<long>(2 * n + 1) * (2 * n + 1) - 1;
    long seen = 0;
    while (seen < expected && std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int k1, k2;
        double a;
        if (!(ls >> k1 >> k2 >> a))
            throw validation_error("load_field: malformed mode line '" + line + "'");
        if (k1 == 0 && k2 == 0)
            throw validation_error("load_field: the (0,0) mode is not storable");
        f.set(k1, k2, a);
        ++seen;
    }
    if (seen != expected)
        throw validation_error("load_field: expected " + std::to_string(expected) +
                               " mode lines, found " + std::to_string(seen));
    return f;
}

void save_field_file(const std::string& path, const SpectralVelocity& f) {
    std::ofstream os(path);
    if (!os) throw validation_error("save_field_file: cannot open '" + path + "'");
    save_field(os, f);
    if (!os) throw validation_error("save_field_file: write failed for '" + path + "'");
}

SpectralVelocity load_field_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw validation_error("load_field_file: cannot open '" + path + "'");
    return load_field(is);
}

} // namespace torusflow
