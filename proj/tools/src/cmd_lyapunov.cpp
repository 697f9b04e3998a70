#include <cmath>
#include <cstdio>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "json.hpp"
#include "torusflow/lyapunov.hpp"

namespace torusflow::cli {

namespace {

struct LyapunovArgs {
    CommonOpts common;
    EvalOpts eval;
    double spinup = 50.0;
    int renorm_steps = 100;
    int batches = 20;
    std::string x0 = "1.0,1.0";
};

int run_lyapunov(const LyapunovArgs& args) {
    const RunConfig cfg = resolve_config(args.common);
    const SimParams p = sim_params(cfg);
    const ForcingSpec fs = forcing_spec(cfg);
    const auto outdir = resolve_outdir(args.common);
    const TorusPoint x0 = parse_point(args.x0);

    ManifestInfo info;
    info.subcommand = "lyapunov";
    info.config = cfg;
    info.eval_mode = args.eval.mode;
    info.spline_factor = args.eval.spline_factor;
    info.substeps = args.eval.substeps;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g", args.spinup);
    info.extras.emplace_back("spinup", buf);
    info.extras.emplace_back("renorm_steps", std::to_string(args.renorm_steps));
    info.extras.emplace_back("batches", std::to_string(args.batches));
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", x0.x1, x0.x2);
    info.extras.emplace_back("x0", buf);
    info.outputs = {"lyapunov.csv", "lyapunov.json"};
    const std::string digest = config_digest(info);
    const auto manifest_path = (outdir / "manifest.json").string();
    write_manifest_started(manifest_path, info);

    try {
        CoIntegration co;
        co.spinup = args.spinup;
        co.duration = cfg.horizon;
        co.x0 = x0;
        co.renorm_steps = args.renorm_steps;
        co.batches = args.batches;
        co.substeps = args.eval.substeps;
        const SpectrumRun run = run_spectrum(p, fs, cfg.seed, co);

        auto csv = open_csv(outdir / "lyapunov.csv", digest,
                            "time,lambda1_running,lambda2_running,sum_running");
        double c1 = 0.0, c2 = 0.0;
        for (size_t i = 0; i < run.log1.size(); ++i) {
            c1 += run.log1[i];
            c2 += run.log2[i];
            const double t = double(i + 1) * run.interval_time;
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", t, c1 / t, c2 / t,
                          (c1 + c2) / t);
            csv << buf;
        }
        csv.close();

        const Spectrum& s = run.spectrum;
        nlohmann::ordered_json out;
        out["config_digest"] = digest;
        out["software"] = kSoftwareVersion;
        out["lambda1"] = s.lambda1;
        out["ci1"] = s.ci1;
        out["lambda2"] = s.lambda2;
        out["ci2"] = s.ci2;
        out["pesin_entropy"] = pesin_entropy(s);
        out["T"] = s.duration;
        out["batches"] = s.batches;
        out["renorm_steps"] = args.renorm_steps;
        out["spinup"] = args.spinup;
        out["x0"] = {x0.x1, x0.x2};
        out["final_position"] = {run.final_position.x1, run.final_position.x2};
        out["ci_excludes_zero"] = (s.lambda1 - s.ci1) > 0.0;
        std::ofstream js(outdir / "lyapunov.json");
        js << out.dump(2) << "\n";
    } catch (const std::exception& e) {
        write_manifest_finished(manifest_path, info, false, e.what());
        throw;
    }
    write_manifest_finished(manifest_path, info, true);
    return 0;
}

} // namespace

void register_lyapunov(CLI::App& app, int& rc) {
    auto args = std::make_shared<LyapunovArgs>();
    CLI::App* cmd = app.add_subcommand(
        "lyapunov", "tracer Lyapunov spectrum by QR co-integration over horizon T");
    add_common_options(cmd, args->common);
    add_eval_options(cmd, args->eval);
    cmd->add_option("--spinup", args->spinup, "velocity spin-up before co-integration")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--renorm-steps", args->renorm_steps,
                    "velocity steps between QR renormalizations")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--batches", args->batches, "batch count for the confidence intervals")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--x0", args->x0, "tracer start 'x1,x2'");
    cmd->callback([args, &rc] { rc = run_lyapunov(*args); });
}

} // namespace torusflow::cli
