#pragma once

// Integer wave vectors on Z^2 \ {0} and the sine/cosine half-lattice split.
//
// The real divergence-free basis indexes sine modes by the half lattice
//   Zplus = {k : k2 > 0} U {k : k1 > 0, k2 = 0}
// and cosine modes by its negation.  Each basis element points along
// perp(k) = (k2, -k1), which makes every field in the span automatically
// incompressible and mean-free.

#include <cmath>
#include <cstdlib>

#include "torusflow/torus.hpp"

namespace torusflow {

struct WaveIndex {
    int k1 = 0, k2 = 0;
    bool operator==(const WaveIndex&) const = default;
};

inline bool is_zero(WaveIndex k) { return k.k1 == 0 && k.k2 == 0; }

// Sine half of the lattice.
inline bool in_zplus(WaveIndex k) {
    return k.k2 > 0 || (k.k2 == 0 && k.k1 > 0);
}

inline WaveIndex negate(WaveIndex k) { return {-k.k1, -k.k2}; }

// perp(k) = (k2, -k1); note perp(-k) = -perp(k).
inline Vec2 unit_perp(WaveIndex k) {
    const double n = std::sqrt(double(k.k1) * k.k1 + double(k.k2) * k.k2);
    return {k.k2 / n, -k.k1 / n};
}

inline double wave_norm2(WaveIndex k) {
    return double(k.k1) * k.k1 + double(k.k2) * k.k2;
}
inline double wave_norm(WaveIndex k) { return std::sqrt(wave_norm2(k)); }

// sup-norm box radius used by the Galerkin truncation
inline int wave_sup(WaveIndex k) { return std::max(std::abs(k.k1), std::abs(k.k2)); }

} // namespace torusflow
