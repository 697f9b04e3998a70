#pragma once

// Forcing amplitudes and the driving Wiener increments.
//
// Amplitudes follow q_k = c |k|^{-alpha} on the retained band.  Well-posedness
// constraints: the four lowest modes k = (+-1,0), (0,+-1) must be forced, and
// the decay exponent must satisfy s+1 < alpha < s+2 for the working Sobolev
// index s (s >= 4, here s is a parameter of the spec).
//
// Increments are generated counter-based: the Gaussian for (mode k, step m)
// is a pure function of (seed, k, origin + m), so trajectories are exactly
// reproducible, modes/steps are independent streams, and the time-shift map
// on noise paths is just an offset of the origin counter.  Generator fixed
// for this release: chained splitmix64 finalizer -> top 53 bits -> Wichura's
// AS241 inverse normal CDF ("splitmix64-as241-v1").

#include <cstdint>
#include <vector>

#include "torusflow/errors.hpp"
#include "torusflow/wave.hpp"

namespace torusflow {

struct ForcingSpec {
    int cutoff = 0;        // N: forced band = retained band
    double sobolev_s = 4.0;
    double alpha = 5.5;
    int threshold = 1;     // power law applies from |k|sup >= threshold (default: everywhere)
    double amplitude = 1.0;  // c
    std::vector<double> q;   // dense (2N+1)^2 square, origin slot 0

    int side() const { return 2 * cutoff + 1; }
    double q_at(int k1, int k2) const { return q[(k2 + cutoff) * side() + (k1 + cutoff)]; }
};

// Builds and validates the power-law forcing.  Throws validation_error when
// alpha is outside (s+1, s+2), s < 4, or any of the four lowest modes would
// be unforced.
ForcingSpec build_forcing(int cutoff, double sobolev_s, double alpha,
                          int threshold = 1, double amplitude = 1.0);

// Standard normal from the fixed counter-based generator.
double counter_gaussian(std::uint64_t seed, int k1, int k2, std::int64_t step);

class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, double dt, std::int64_t origin = 0)
        : seed_(seed), dt_(dt), origin_(origin) {
        if (!(dt > 0.0)) throw validation_error("NoiseStream: dt must be positive");
    }

    std::uint64_t seed() const { return seed_; }
    double dt() const { return dt_; }
    std::int64_t origin() const { return origin_; }

    // xi ~ N(0,1) for (mode, local step); deterministic in all arguments.
    double standard_normal(WaveIndex k, std::int64_t step) const {
        return counter_gaussian(seed_, k.k1, k.k2, origin_ + step);
    }

    // Wiener increment over one step: N(0, dt).
    double increment(WaveIndex k, std::int64_t step) const;

    // Fill a dense (2N+1)^2 square of increments for one step (origin slot 0).
    void increments(int cutoff, std::int64_t step, double* square) const;

    // The time-shift map on driving paths: drop the first `steps` increments.
    // shifted(a).shifted(b) == shifted(a+b).
    NoiseStream shifted(std::int64_t steps) const {
        return NoiseStream(seed_, dt_, origin_ + steps);
    }

private:
    std::uint64_t seed_;
    double dt_;
    std::int64_t origin_;
};

} // namespace torusflow
