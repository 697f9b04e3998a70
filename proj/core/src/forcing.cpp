#include "torusflow/forcing.hpp"

#include <cmath>

namespace torusflow {

ForcingSpec build_forcing(int cutoff, double sobolev_s, double alpha,
                          int threshold, double amplitude) {
    if (cutoff < 1)
        throw validation_error("build_forcing: cutoff must be >= 1");
    if (sobolev_s < 4.0)
        throw validation_error("build_forcing: Sobolev index s must be >= 4, got " +
                               std::to_string(sobolev_s));
    if (!(alpha > sobolev_s + 1.0 && alpha < sobolev_s + 2.0))
        throw validation_error("build_forcing: alpha must lie in (s+1, s+2) = (" +
                               std::to_string(sobolev_s + 1.0) + ", " +
                               std::to_string(sobolev_s + 2.0) + "), got " +
                               std::to_string(alpha));
    if (threshold < 1)
        throw validation_error("build_forcing: power-law threshold must be >= 1");
    if (!(amplitude > 0.0))
        throw validation_error("build_forcing: amplitude c must be positive");

    ForcingSpec f;
    f.cutoff = cutoff;
    f.sobolev_s = sobolev_s;
    f.alpha = alpha;
    f.threshold = threshold;
    f.amplitude = amplitude;
    f.q.assign(static_cast<size_t>(f.side()) * f.side(), 0.0);
    for (int k2 = -cutoff; k2 <= cutoff; ++k2)
        for (int k1 = -cutoff; k1 <= cutoff; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            // below the threshold the power law is extended as-is; the
            // default threshold 1 makes this the whole band
            const double kn = std::sqrt(double(k1) * k1 + double(k2) * k2);
            f.q[(k2 + cutoff) * f.side() + (k1 + cutoff)] =
                amplitude * std::pow(kn, -alpha);
        }

    // the four lowest modes must carry noise
    for (auto [k1, k2] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        if (!(f.q_at(k1, k2) > 0.0))
            throw validation_error("build_forcing: lowest modes (+-1,0),(0,+-1) must be forced");
    return f;
}

namespace {

inline std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Wichura's algorithm AS241 (PPND16): inverse of the standard normal CDF,
// accurate to ~1e-16 over (0,1).
double inverse_normal_cdf(double p) {
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -v : v;
}

} // namespace

double counter_gaussian(std::uint64_t seed, int k1, int k2, std::int64_t step) {
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k1)));
    h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k2)));
    h = splitmix(h ^ static_cast<std::uint64_t>(step));
    // top 53 bits -> uniform on the open interval (0,1)
    const double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    return inverse_normal_cdf(u);
}

double NoiseStream::increment(WaveIndex k, std::int64_t step) const {
    if (is_zero(k))
        throw validation_error("NoiseStream::increment: (0,0) carries no noise");
    return std::sqrt(dt_) * standard_normal(k, step);
}

void NoiseStream::increments(int cutoff, std::int64_t step, double* square) const {
    const int side = 2 * cutoff + 1;
    const double root_dt = std::sqrt(dt_);
    for (int k2 = -cutoff; k2 <= cutoff; ++k2)
        for (int k1 = -cutoff; k1 <= cutoff; ++k1)
            square[(k2 + cutoff) * side + (k1 + cutoff)] =
                (k1 == 0 && k2 == 0)
                    ? 0.0
                    : root_dt * counter_gaussian(seed_, k1, k2, origin_ + step);
}

} // namespace torusflow
