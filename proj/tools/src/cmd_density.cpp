#include <cmath>
#include <cstdio>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "json.hpp"
#include "torusflow/trajectory.hpp"

namespace torusflow::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct DensityArgs {
    CommonOpts common;
    EvalOpts eval{"interpolated", 1, 8};
    std::string trajectory;
    std::string balls_spec;
    int horizon = 40;
    double tau = 1.0;
    int cap = 2;
    std::int64_t budget = 200000;
    int max_depth = 12;
    int workers = 1;
};

int run_density(const DensityArgs& args) {
    const RunConfig cfg = resolve_config(args.common);
    const auto outdir = resolve_outdir(args.common);
    const BallPair balls =
        args.balls_spec.empty()
            ? BallPair{{{kPi / 2, kPi / 2}, 0.5}, {{3 * kPi / 2, 3 * kPi / 2}, 0.5}}
            : parse_balls(args.balls_spec);
    validate_balls(balls);

    ManifestInfo info;
    info.subcommand = "density";
    info.config = cfg;
    info.eval_mode = args.eval.mode;
    info.spline_factor = args.eval.spline_factor;
    info.substeps = args.eval.substeps;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g;%.17g,%.17g,%.17g",
                  balls.first.center.x1, balls.first.center.x2, balls.first.radius,
                  balls.second.center.x1, balls.second.center.x2, balls.second.radius);
    info.extras.emplace_back("balls", buf);
    info.extras.emplace_back("horizon", std::to_string(args.horizon));
    std::snprintf(buf, sizeof buf, "%.17g", args.tau);
    info.extras.emplace_back("tau", buf);
    info.extras.emplace_back("cap", std::to_string(args.cap));
    info.extras.emplace_back("budget", std::to_string(args.budget));
    info.extras.emplace_back("max_depth", std::to_string(args.max_depth));
    info.extras.emplace_back("workers", std::to_string(args.workers));
    if (!args.trajectory.empty()) info.inputs = {args.trajectory};
    info.outputs = {"density.json", "density_indices.csv"};
    const std::string digest = config_digest(info);
    const auto manifest_path = (outdir / "manifest.json").string();
    write_manifest_started(manifest_path, info);

    try {
        std::string source;
        const StoredTrajectory tr =
            obtain_trajectory(args.trajectory, cfg, args.horizon * args.tau, source);

        FlowOracle oracle;
        oracle.trajectory = &tr;
        oracle.options = advect_options(args.eval);
        DensityOptions opt;
        opt.tau = args.tau;
        opt.horizon = args.horizon;
        opt.cap = args.cap;
        opt.budget.max_cells = args.budget;
        opt.budget.max_depth = args.max_depth;
        opt.budget.workers = args.workers;

        const DensityReport rep = estimate_hitting_density(balls, oracle, opt);

        auto csv = open_csv(outdir / "density_indices.csv", digest,
                            "index,outcome,words_certified,words_total,cells");
        for (const DensityIndexRecord& r : rep.records) {
            std::snprintf(buf, sizeof buf, "%d,%c,%d,%d,%lld\n", r.index, r.outcome,
                          r.words_certified, r.words_total,
                          static_cast<long long>(r.cells));
            csv << buf;
        }
        csv.close();

        nlohmann::ordered_json out;
        out["config_digest"] = digest;
        out["software"] = kSoftwareVersion;
        out["trajectory_source"] = source;
        out["horizon"] = rep.horizon;
        out["tau"] = rep.tau;
        out["cap"] = rep.cap;
        out["certified_indices"] = rep.certified;
        out["undetermined_indices"] = rep.undetermined;
        out["density"] = rep.density;
        out["undetermined_fraction"] =
            rep.horizon > 0 ? double(rep.undetermined.size()) / rep.horizon : 0.0;
        out["symbolic_entropy_lower_bound"] = symbolic_entropy_lower_bound(rep);
        out["cells_total"] = rep.cells_total;
        std::ofstream js(outdir / "density.json");
        js << out.dump(2) << "\n";
    } catch (const std::exception& e) {
        write_manifest_finished(manifest_path, info, false, e.what());
        throw;
    }
    write_manifest_finished(manifest_path, info, true);
    return 0;
}

} // namespace

void register_density(CLI::App& app, int& rc) {
    auto args = std::make_shared<DensityArgs>();
    CLI::App* cmd = app.add_subcommand(
        "density",
        "greedy certified hitting-set scan: lower-bound the density of itinerary times");
    add_common_options(cmd, args->common);
    add_eval_options(cmd, args->eval);
    cmd->add_option("--trajectory", args->trajectory,
                    "velocity trajectory container (default: regenerate from config)");
    cmd->add_option("--balls", args->balls_spec,
                    "'c1x,c1y,r1;c2x,c2y,r2' (default: antipodal radius 0.5)");
    cmd->add_option("--n", args->horizon, "horizon: candidate indices 0..n-1")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tau", args->tau, "index time spacing")->check(CLI::PositiveNumber);
    cmd->add_option("--cap", args->cap, "window length bound")
        ->check(CLI::Range(1, kMaxItinerary));
    cmd->add_option("--budget", args->budget, "cell-orbit budget per window")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-depth", args->max_depth, "quadtree depth limit")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", args->workers, "threads for batch orbit evaluation")
        ->check(CLI::PositiveNumber);
    cmd->callback([args, &rc] { rc = run_density(*args); });
}

} // namespace torusflow::cli
