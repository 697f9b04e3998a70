#pragma once

// Plain-text run configuration: ordered `key = value` lines.  Recognized keys
// (all optional; later lines win):
//
//   epsilon   viscosity                                  default 0.1
//   dt        time step                                  default 0.001
//   N         spectral cutoff                            default 16
//   M         transform grid; 0 = smallest even >= 3N    default 0
//   T         integration horizon                        default 10
//   seed      noise seed                                 default 1
//   alpha     forcing decay exponent                     default 5.5
//   s         Sobolev index of the working norm          default 4
//   L         forcing power-law threshold                default 1
//   c         forcing amplitude                          default 1
//   burn_in   discarded lead-in time                     default 0
//   thin      diagnostics stride in steps                default 1
//
// Blank lines and '#' comments are ignored; unknown keys are rejected.
// Precedence is defaults < config < command-line flags; the parser handles
// the first two layers, flag layering is the caller's job.

#include <cstdint>
#include <string>

#include "torusflow/forcing.hpp"
#include "torusflow/integrator.hpp"

namespace torusflow {

struct RunConfig {
    double epsilon = 0.1;
    double dt = 1e-3;
    int cutoff = 16;    // N
    int grid = 0;       // M; 0 = auto
    double horizon = 10.0;  // T
    std::uint64_t seed = 1;
    double alpha = 5.5;
    double sobolev = 4.0;  // s
    int threshold = 1;     // L
    double amplitude = 1.0;  // c
    double burn_in = 0.0;
    int thin = 1;
};

// Smallest even grid size >= 3 * cutoff.
int auto_grid(int cutoff);

// Syntax + typing only; range validation happens in sim_params/forcing_spec
// so errors cite the owning module's constraint.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Validated parameter bundles derived from a config.
SimParams sim_params(const RunConfig& cfg);
ForcingSpec forcing_spec(const RunConfig& cfg);

} // namespace torusflow
