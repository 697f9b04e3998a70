#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <vector>

#include "commands.hpp"
#include "common.hpp"
#include "torusflow/trajectory.hpp"

namespace torusflow::cli {

namespace {

struct AdvectArgs {
    CommonOpts common;
    EvalOpts eval;
    std::string trajectory;          // container file (required)
    std::string points_file;         // CSV of "x1,x2" lines
    std::vector<std::string> points; // repeatable --point
    double duration = 0.0;           // 0 = full trajectory
    int stride = 1;                  // output row stride, in segments
};

std::vector<TorusPoint> gather_points(const AdvectArgs& args) {
    std::vector<TorusPoint> pts;
    for (const std::string& s : args.points) pts.push_back(parse_point(s));
    if (!args.points_file.empty()) {
        std::ifstream is(args.points_file);
        if (!is)
            throw validation_error("cannot open points file '" + args.points_file + "'");
        std::string line;
        while (std::getline(is, line)) {
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            size_t b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            size_t e = line.find_last_not_of(" \t\r");
            pts.push_back(parse_point(line.substr(b, e - b + 1)));
        }
    }
    if (pts.empty())
        throw validation_error("advect: no initial points (use --point or --points)");
    return pts;
}

int run_advect(const AdvectArgs& args) {
    const RunConfig cfg = resolve_config(args.common);
    const auto outdir = resolve_outdir(args.common);
    const std::vector<TorusPoint> pts = gather_points(args);

    ManifestInfo info;
    info.subcommand = "advect";
    info.config = cfg;
    info.eval_mode = args.eval.mode;
    info.spline_factor = args.eval.spline_factor;
    info.substeps = args.eval.substeps;
    char buf[192];
    std::snprintf(buf, sizeof buf, "%.17g", args.duration);
    info.extras.emplace_back("duration", buf);
    info.extras.emplace_back("stride", std::to_string(args.stride));
    for (size_t i = 0; i < pts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", pts[i].x1, pts[i].x2);
        info.extras.emplace_back("point" + std::to_string(i), buf);
    }
    info.inputs = {args.trajectory};
    for (size_t i = 0; i < pts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "orbit_%03zu.csv", i);
        info.outputs.emplace_back(buf);
    }
    const std::string digest = config_digest(info);
    const auto manifest_path = (outdir / "manifest.json").string();
    write_manifest_started(manifest_path, info);

    try {
        const StoredTrajectory tr = load_trajectory_file(args.trajectory);
        const double dt = tr.dt();
        auto segs = tr.segments();
        if (args.duration > 0.0) {
            const auto want = static_cast<std::int64_t>(std::llround(args.duration / dt));
            if (want < 1 || want > segs)
                throw validation_error("advect: duration must lie in (0, trajectory span]");
            segs = want;
        }
        const AdvectOptions opt = advect_options(args.eval);

        for (size_t i = 0; i < pts.size(); ++i) {
            std::snprintf(buf, sizeof buf, "orbit_%03zu.csv", i);
            auto csv = open_csv(outdir / buf, digest, "time,x1,x2,D11,D12,D21,D22");
            TracerState t{pts[i], 0.0};
            TangentState d;
            auto row = [&](double time) {
                std::snprintf(buf, sizeof buf,
                              "%.12g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", time,
                              t.position.x1, t.position.x2, d.matrix.a, d.matrix.b,
                              d.matrix.c, d.matrix.d);
                csv << buf;
            };
            row(0.0);
            for (std::int64_t s = 0; s < segs; ++s) {
                const FlowState s0{s, s * dt, tr.field(s)};
                const FlowState s1{s + 1, (s + 1) * dt, tr.field(s + 1)};
                advect_tangent(t, d, s0, s1, opt);
                if ((s + 1) % std::max(1, args.stride) == 0 || s + 1 == segs)
                    row((s + 1) * dt);
            }
        }
    } catch (const std::exception& e) {
        write_manifest_finished(manifest_path, info, false, e.what());
        throw;
    }
    write_manifest_finished(manifest_path, info, true);
    return 0;
}

} // namespace

void register_advect(CLI::App& app, int& rc) {
    auto args = std::make_shared<AdvectArgs>();
    CLI::App* cmd = app.add_subcommand(
        "advect", "integrate passive tracers + tangent maps along a stored trajectory");
    add_common_options(cmd, args->common);
    add_eval_options(cmd, args->eval);
    cmd->add_option("--trajectory", args->trajectory, "velocity trajectory container")
        ->required();
    cmd->add_option("--points", args->points_file, "CSV file of x1,x2 initial points");
    cmd->add_option("--point", args->points, "inline initial point 'x1,x2' (repeatable)");
    cmd->add_option("--duration", args->duration,
                    "advection span, time units (default: full trajectory)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--stride", args->stride, "output row stride in segments")
        ->check(CLI::PositiveNumber);
    cmd->callback([args, &rc] { rc = run_advect(*args); });
}

} // namespace torusflow::cli
