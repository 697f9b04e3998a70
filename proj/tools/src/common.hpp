#pragma once

// Shared plumbing for the torusflow CLI: option layering (defaults < config
// file < explicit flags), output-directory resolution, digest-stamped CSV
// streams, and the small parsers for ball/index/point specs.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "torusflow/config.hpp"
#include "torusflow/horseshoe.hpp"
#include "torusflow/manifest.hpp"

namespace torusflow::cli {

// Environment variable consulted when --out is not given; falls back to ".".
inline constexpr const char* kOutdirEnv = "TORUSFLOW_OUTDIR";

struct CommonOpts {
    CLI::App* cmd = nullptr;
    std::string config_path;
    std::string outdir;
    // staging values for flag overrides; applied only when the flag was given
    double epsilon = 0, dt = 0, horizon = 0, alpha = 0, sobolev = 0, amplitude = 0,
           burn_in = 0;
    int cutoff = 0, grid = 0, threshold = 0, thin = 0;
    std::uint64_t seed = 0;
};

// Registers --config/--out plus one flag per config key on `cmd`.
void add_common_options(CLI::App* cmd, CommonOpts& o);

// defaults < config file < flags that were actually passed.
RunConfig resolve_config(const CommonOpts& o);

// --out flag, else $TORUSFLOW_OUTDIR, else "."; created if absent.
std::filesystem::path resolve_outdir(const CommonOpts& o);

struct EvalOpts {
    std::string mode = "automatic";  // automatic | exact | interpolated
    int substeps = 1;
    int spline_factor = 8;
};

void add_eval_options(CLI::App* cmd, EvalOpts& e);
AdvectOptions advect_options(const EvalOpts& e);

// Opens path and stamps "# config_digest=..." plus the column header.
std::ofstream open_csv(const std::filesystem::path& path, const std::string& digest,
                       const std::string& header);

// "c1x,c1y,r1;c2x,c2y,r2"
BallPair parse_balls(const std::string& spec);
// "0,1,2,5" -> strictly increasing nonnegative ints
std::vector<int> parse_indices(const std::string& spec);
// "x1,x2"
TorusPoint parse_point(const std::string& spec);

// Comma-separated reals, the shared scanner behind the three parsers above.
std::vector<double> parse_reals(const std::string& spec, size_t expected,
                                const std::string& what);

// Velocity trajectory for the certifier commands: load from `path` when
// given, otherwise burn in for cfg.burn_in and record `duration` time units
// with the configured integrator.  `source` receives a description for the
// manifest.
StoredTrajectory obtain_trajectory(const std::string& path, const RunConfig& cfg,
                                   double duration, std::string& source);

} // namespace torusflow::cli
