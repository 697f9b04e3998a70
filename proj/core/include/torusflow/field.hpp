#pragma once

// Galerkin-truncated divergence-free velocity fields on the 2-torus.
//
// A field is u(x) = sum_k a_k e_k(x) over 0 < max(|k1|,|k2|) <= N with the
// real basis
//   e_k(x) = perp(k)/|k| * sin(k.x)   for k in Zplus,
//   e_k(x) = perp(k)/|k| * cos(k.x)   for k in Zminus = -Zplus.
// The basis is not L2-normalized: ||e_k||_L2 = sqrt(2)*pi.  All bookkeeping
// (energy, enstrophy, Sobolev norms, noise balance) is done directly on the
// coefficients a_k:
//   energy     = 1/2 sum a_k^2
//   enstrophy  = 1/2 sum |k|^2 a_k^2
//   ||u||_{H^s}^2 = sum (1 + |k|^2)^s a_k^2
//
// Coefficients are stored densely on the (2N+1)^2 index square with the
// origin slot pinned to zero; accessors are bounds-checked, hot loops use
// the raw span.

#include <complex>
#include <iosfwd>
#include <vector>

#include "torusflow/errors.hpp"
#include "torusflow/torus.hpp"
#include "torusflow/wave.hpp"

namespace torusflow {

// One basis element at one point; throws validation_error on k = 0.
Vec2 basis_eval(WaveIndex k, TorusPoint x);

class SpectralVelocity {
public:
    SpectralVelocity() : SpectralVelocity(1) {}
    explicit SpectralVelocity(int cutoff);

    int cutoff() const { return n_; }
    int side() const { return 2 * n_ + 1; }
    int mode_count() const { return side() * side() - 1; }

    // Dense storage, row index k2, column index k1, both offset by N.
    double* data() { return amp_.data(); }
    const double* data() const { return amp_.data(); }
    int index_of(int k1, int k2) const { return (k2 + n_) * side() + (k1 + n_); }

    double at(int k1, int k2) const;        // bounds-checked read, 0 index allowed (always 0)
    void set(int k1, int k2, double a);     // bounds-checked write, rejects the 0 index

    double energy() const;
    double enstrophy() const;
    double sobolev_norm(double s) const;

    // Exact basis summation.  O(N^2) per call; the tracer hot path goes
    // through the shared evaluation tables in tracer.cpp instead.
    Vec2 evaluate(TorusPoint x) const;
    Mat2 gradient(TorusPoint x) const;
    void evaluate_with_gradient(TorusPoint x, Vec2& u, Mat2& grad) const;

    bool operator==(const SpectralVelocity&) const = default;

private:
    int n_;
    std::vector<double> amp_;
};

// Fused evaluation straight from a dense amplitude square (the tracer hot
// path blends amplitude arrays in time and calls this without materializing
// a SpectralVelocity).
void eval_amplitudes(const double* amp, int cutoff, TorusPoint x, Vec2& u, Mat2& grad);
Vec2 eval_amplitudes_velocity(const double* amp, int cutoff, TorusPoint x);

// ---- complex exponential bridge ----------------------------------------
//
// u(x) = sum_k uhat_k e^{i k.x} with uhat_{-k} = conj(uhat_k) and
// uhat_k = perp(k)/|k| * (-a_{-k} - i a_k)/2 for k in Zplus.  (The cosine
// amplitude enters with a minus sign because perp(-k) = -perp(k).)
struct ComplexModes {
    int cutoff = 0;
    // dense on the same (2N+1)^2 square; component-wise coefficients
    std::vector<std::complex<double>> c1, c2;

    explicit ComplexModes(int n)
        : cutoff(n),
          c1((2 * n + 1) * (2 * n + 1)), c2((2 * n + 1) * (2 * n + 1)) {}
    int side() const { return 2 * cutoff + 1; }
    int index_of(int k1, int k2) const {
        return (k2 + cutoff) * side() + (k1 + cutoff);
    }
};

ComplexModes to_complex(const SpectralVelocity& f);

// Inverts to_complex.  Rejects inputs that are not conjugate-symmetric or
// that have components along k (non-divergence-free) beyond rel_tol of the
// field scale.
SpectralVelocity from_complex(const ComplexModes& m, double rel_tol = 1e-10);

// ---- text checkpoints ----------------------------------------------------
//
// Line-oriented format: header "N=<cutoff>", then one line "k1 k2 a" per
// retained mode in fixed row-major order, 17 significant digits (round-trips
// doubles exactly).
void save_field(std::ostream& os, const SpectralVelocity& f);
SpectralVelocity load_field(std::istream& is);
void save_field_file(const std::string& path, const SpectralVelocity& f);
SpectralVelocity load_field_file(const std::string& path);

} // namespace torusflow
