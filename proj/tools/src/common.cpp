#include "common.hpp"

#include <cstdlib>

#include "torusflow/trajectory.hpp"

namespace torusflow::cli {

void add_common_options(CLI::App* cmd, CommonOpts& o) {
    o.cmd = cmd;
    cmd->add_option("--config", o.config_path, "key = value configuration file");
    cmd->add_option("--out", o.outdir,
                    "output directory (default: $TORUSFLOW_OUTDIR, else '.')");
    cmd->add_option("--epsilon", o.epsilon, "viscosity");
    cmd->add_option("--dt", o.dt, "time step");
    cmd->add_option("--N", o.cutoff, "spectral cutoff");
    cmd->add_option("--M", o.grid, "transform grid (0 = smallest even >= 3N)");
    cmd->add_option("--T", o.horizon, "integration horizon, time units");
    cmd->add_option("--seed", o.seed, "noise seed");
    cmd->add_option("--alpha", o.alpha, "forcing decay exponent");
    cmd->add_option("--s", o.sobolev, "Sobolev index of the working norm");
    cmd->add_option("--L", o.threshold, "forcing power-law threshold");
    cmd->add_option("--c", o.amplitude, "forcing amplitude");
    cmd->add_option("--burn-in", o.burn_in, "discarded lead-in time");
    cmd->add_option("--thin", o.thin, "diagnostics stride in steps");
}

RunConfig resolve_config(const CommonOpts& o) {
    RunConfig cfg;
    if (!o.config_path.empty()) cfg = load_config_file(o.config_path);
    const CLI::App* cmd = o.cmd;
    if (cmd->count("--epsilon")) cfg.epsilon = o.epsilon;
    if (cmd->count("--dt")) cfg.dt = o.dt;
    if (cmd->count("--N")) cfg.cutoff = o.cutoff;
    if (cmd->count("--M")) cfg.grid = o.grid;
    if (cmd->count("--T")) cfg.horizon = o.horizon;
    if (cmd->count("--seed")) cfg.seed = o.seed;
    if (cmd->count("--alpha")) cfg.alpha = o.alpha;
    if (cmd->count("--s")) cfg.sobolev = o.sobolev;
    if (cmd->count("--L")) cfg.threshold = o.threshold;
    if (cmd->count("--c")) cfg.amplitude = o.amplitude;
    if (cmd->count("--burn-in")) cfg.burn_in = o.burn_in;
    if (cmd->count("--thin")) cfg.thin = o.thin;
    return cfg;
}

std::filesystem::path resolve_outdir(const CommonOpts& o) {
    std::filesystem::path dir;
    if (!o.outdir.empty()) {
        dir = o.outdir;
    } else if (const char* env = std::getenv(kOutdirEnv); env && *env) {
        dir = env;
    } else {
        dir = ".";
    }
    std::filesystem::create_directories(dir);
    return dir;
}

void add_eval_options(CLI::App* cmd, EvalOpts& e) {
    cmd->add_option("--eval", e.mode, "tracer field evaluation: automatic|exact|interpolated")
        ->check(CLI::IsMember({"automatic", "exact", "interpolated"}));
    cmd->add_option("--substeps", e.substeps, "tracer steps per velocity segment")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--spline-factor", e.spline_factor,
                    "interpolation grid scale (interpolated mode)")
        ->check(CLI::PositiveNumber);
}

AdvectOptions advect_options(const EvalOpts& e) {
    AdvectOptions opt;
    opt.substeps = e.substeps;
    opt.spline_factor = e.spline_factor;
    if (e.mode == "exact")
        opt.mode = EvalMode::exact;
    else if (e.mode == "interpolated")
        opt.mode = EvalMode::interpolated;
    else
        opt.mode = EvalMode::automatic;
    return opt;
}

std::ofstream open_csv(const std::filesystem::path& path, const std::string& digest,
                       const std::string& header) {
    std::ofstream os(path);
    if (!os) throw validation_error("cannot open output file '" + path.string() + "'");
    os << "# config_digest=" << digest << "\n" << header << "\n";
    return os;
}

std::vector<double> parse_reals(const std::string& spec, size_t expected,
                                const std::string& what) {
    std::vector<double> vals;
    size_t pos = 0;
    while (pos <= spec.size()) {
        const size_t comma = spec.find(',', pos);
        const std::string tok =
            spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            size_t used = 0;
            vals.push_back(std::stod(tok, &used));
            while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
                ++used;
            if (used != tok.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw validation_error(what + ": unparsable number '" + tok + "' in '" + spec +
                                   "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (vals.size() != expected)
        throw validation_error(what + ": expected " + std::to_string(expected) +
                               " comma-separated numbers, got " +
                               std::to_string(vals.size()) + " in '" + spec + "'");
    return vals;
}

BallPair parse_balls(const std::string& spec) {
    const size_t semi = spec.find(';');
    if (semi == std::string::npos)
        throw validation_error(
            "ball spec must be 'c1x,c1y,r1;c2x,c2y,r2', got '" + spec + "'");
    const auto a = parse_reals(spec.substr(0, semi), 3, "ball spec");
    const auto b = parse_reals(spec.substr(semi + 1), 3, "ball spec");
    BallPair balls{{TorusPoint::wrapped(a[0], a[1]), a[2]},
                   {TorusPoint::wrapped(b[0], b[1]), b[2]}};
    validate_balls(balls);
    return balls;
}

std::vector<int> parse_indices(const std::string& spec) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos <= spec.size()) {
        const size_t comma = spec.find(',', pos);
        const std::string tok =
            spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            size_t used = 0;
            const int v = std::stoi(tok, &used);
            while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
                ++used;
            if (used != tok.size()) throw std::invalid_argument("trailing characters");
            out.push_back(v);
        } catch (const std::exception&) {
            throw validation_error("index spec: unparsable integer '" + tok + "' in '" +
                                   spec + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw validation_error("index spec: empty");
    for (size_t i = 0; i < out.size(); ++i) {
        if (out[i] < 0) throw validation_error("index spec: indices must be >= 0");
        if (i > 0 && out[i] <= out[i - 1])
            throw validation_error("index spec: indices must be strictly increasing");
    }
    return out;
}

TorusPoint parse_point(const std::string& spec) {
    const auto v = parse_reals(spec, 2, "point spec");
    return TorusPoint::wrapped(v[0], v[1]);
}

StoredTrajectory obtain_trajectory(const std::string& path, const RunConfig& cfg,
                                   double duration, std::string& source) {
    if (!path.empty()) {
        source = "file:" + path;
        return load_trajectory_file(path);
    }
    const SimParams p = sim_params(cfg);
    const ForcingSpec fs = forcing_spec(cfg);
    NseIntegrator integ(p, fs);
    NoiseStream noise(cfg.seed, p.dt);
    FlowState st{0, 0.0, SpectralVelocity(p.cutoff)};
    const auto burn_steps = static_cast<std::int64_t>(std::llround(cfg.burn_in / p.dt));
    for (std::int64_t i = 0; i < burn_steps; ++i) integ.step_in_place(st, noise);
    source = "regenerated:seed=" + std::to_string(cfg.seed) +
             ",burn_in=" + std::to_string(cfg.burn_in);
    st.step = 0;
    st.time = 0.0;
    return record_trajectory(p, fs, std::move(st), noise.shifted(burn_steps), duration);
}

} // namespace torusflow::cli
