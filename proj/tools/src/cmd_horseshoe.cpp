#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include "commands.hpp"
#include "common.hpp"
#include "json.hpp"
#include "torusflow/trajectory.hpp"

namespace torusflow::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string word_string(const std::vector<std::uint8_t>& symbols) {
    std::string s;
    s.reserve(symbols.size());
    for (std::uint8_t v : symbols) s.push_back(char('0' + v));
    return s;
}

const char* status_name(WordStatus st) {
    switch (st) {
        case WordStatus::certified: return "certified";
        case WordStatus::excluded: return "excluded";
        default: return "exhausted";
    }
}

nlohmann::ordered_json certificate_json(const CellCertificate& c) {
    nlohmann::ordered_json j;
    j["point"] = {c.point.x1, c.point.x2};
    j["half_width"] = c.half_width;
    j["depth"] = c.depth;
    j["margins"] = c.margins;
    j["lipschitz"] = c.lipschitz;
    auto imgs = nlohmann::ordered_json::array();
    for (const TorusPoint& x : c.images) imgs.push_back({x.x1, x.x2});
    j["images"] = std::move(imgs);
    return j;
}

struct HorseshoeArgs {
    CommonOpts common;
    EvalOpts eval{"interpolated", 1, 8};
    std::string trajectory;
    std::string balls_spec;  // empty = antipodal radius-0.5 default
    std::string indices_spec = "0,1,2,3,4,5";
    double tau = 1.5;
    std::int64_t budget = 200000;
    int max_depth = 12;
    int workers = 1;
    int reverify = 3;
};

int run_horseshoe(const HorseshoeArgs& args) {
    const RunConfig cfg = resolve_config(args.common);
    const auto outdir = resolve_outdir(args.common);
    const BallPair balls =
        args.balls_spec.empty()
            ? BallPair{{{kPi / 2, kPi / 2}, 0.5}, {{3 * kPi / 2, 3 * kPi / 2}, 0.5}}
            : parse_balls(args.balls_spec);
    validate_balls(balls);
    const std::vector<int> indices = parse_indices(args.indices_spec);

    ManifestInfo info;
    info.subcommand = "horseshoe";
    info.config = cfg;
    info.eval_mode = args.eval.mode;
    info.spline_factor = args.eval.spline_factor;
    info.substeps = args.eval.substeps;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g;%.17g,%.17g,%.17g",
                  balls.first.center.x1, balls.first.center.x2, balls.first.radius,
                  balls.second.center.x1, balls.second.center.x2, balls.second.radius);
    info.extras.emplace_back("balls", buf);
    info.extras.emplace_back("indices", args.indices_spec);
    std::snprintf(buf, sizeof buf, "%.17g", args.tau);
    info.extras.emplace_back("tau", buf);
    info.extras.emplace_back("budget", std::to_string(args.budget));
    info.extras.emplace_back("max_depth", std::to_string(args.max_depth));
    info.extras.emplace_back("workers", std::to_string(args.workers));
    if (!args.trajectory.empty()) info.inputs = {args.trajectory};
    info.outputs = {"horseshoe.json", "certified_points.csv"};
    const std::string digest = config_digest(info);
    const auto manifest_path = (outdir / "manifest.json").string();
    write_manifest_started(manifest_path, info);

    int rc = 0;
    try {
        std::string source;
        const double duration = indices.back() * args.tau;
        const StoredTrajectory tr = obtain_trajectory(
            args.trajectory, cfg, std::max(duration, args.tau), source);

        FlowOracle oracle;
        oracle.trajectory = &tr;
        oracle.options = advect_options(args.eval);
        SearchBudget budget;
        budget.max_cells = args.budget;
        budget.max_depth = args.max_depth;
        budget.workers = args.workers;

        const HorseshoeReport rep =
            certify_full_horseshoe(balls, indices, args.tau, oracle, budget);

        auto csv = open_csv(outdir / "certified_points.csv", digest,
                            "word,x1,x2,half_width,depth,min_margin");
        int certified = 0, excluded = 0, exhausted = 0;
        for (const WordReport& w : rep.words) {
            if (w.status == WordStatus::certified) {
                ++certified;
                const double mmin = w.certificate.margins.empty()
                                        ? 0.0
                                        : *std::min_element(w.certificate.margins.begin(),
                                                            w.certificate.margins.end());
                std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%d,%.17g\n",
                              word_string(w.symbols).c_str(), w.certificate.point.x1,
                              w.certificate.point.x2, w.certificate.half_width,
                              w.certificate.depth, mmin);
                csv << buf;
            } else if (w.status == WordStatus::excluded) {
                ++excluded;
            } else {
                ++exhausted;
            }
        }
        csv.close();

        nlohmann::ordered_json out;
        out["config_digest"] = digest;
        out["software"] = kSoftwareVersion;
        out["trajectory_source"] = source;
        out["balls"] = {{"first", {balls.first.center.x1, balls.first.center.x2,
                                   balls.first.radius}},
                        {"second", {balls.second.center.x1, balls.second.center.x2,
                                    balls.second.radius}}};
        out["indices"] = rep.indices;
        out["tau"] = rep.tau;
        out["words_total"] = rep.words.size();
        out["words_certified"] = certified;
        out["words_excluded"] = excluded;
        out["words_exhausted"] = exhausted;
        out["full_horseshoe"] = rep.full_horseshoe;
        out["cells_evaluated"] = rep.cells_evaluated;
        out["deepest_cell"] = rep.deepest_cell;
        auto words = nlohmann::ordered_json::array();
        for (const WordReport& w : rep.words) {
            nlohmann::ordered_json jw;
            jw["word"] = word_string(w.symbols);
            jw["status"] = status_name(w.status);
            jw["depth_reached"] = w.depth_reached;
            if (w.status == WordStatus::certified)
                jw["certificate"] = certificate_json(w.certificate);
            if (w.status == WordStatus::exhausted) {
                jw["failure"] = w.failure;
                jw["frontier_size"] = w.frontier_size;
            }
            words.push_back(std::move(jw));
        }
        out["words"] = std::move(words);

        if (args.reverify > 0) {
            auto rv = nlohmann::ordered_json::array();
            bool all_passed = true;
            int done = 0;
            for (const WordReport& w : rep.words) {
                if (done >= args.reverify) break;
                if (w.status != WordStatus::certified) continue;
                ItineraryWord word{rep.indices, w.symbols, rep.tau};
                const ReverifyResult r =
                    reverify_certificate(balls, word, w.certificate, oracle);
                nlohmann::ordered_json jr;
                jr["word"] = word_string(w.symbols);
                jr["passed"] = r.passed;
                jr["margins_fine"] = r.margins;
                rv.push_back(std::move(jr));
                all_passed = all_passed && r.passed;
                ++done;
            }
            out["reverify"] = std::move(rv);
            out["reverify_all_passed"] = all_passed;
        }

        std::ofstream js(outdir / "horseshoe.json");
        js << out.dump(2) << "\n";
        js.close();
        rc = exhausted > 0 ? 4 : 0;
    } catch (const std::exception& e) {
        write_manifest_finished(manifest_path, info, false, e.what());
        throw;
    }
    write_manifest_finished(manifest_path, info, true);
    return rc;
}

} // namespace

void register_horseshoe(CLI::App& app, int& rc) {
    auto args = std::make_shared<HorseshoeArgs>();
    CLI::App* cmd = app.add_subcommand(
        "horseshoe",
        "certify every {1,2}-itinerary over an index grid against two target balls");
    add_common_options(cmd, args->common);
    add_eval_options(cmd, args->eval);
    cmd->add_option("--trajectory", args->trajectory,
                    "velocity trajectory container (default: regenerate from config)");
    cmd->add_option("--balls", args->balls_spec,
                    "'c1x,c1y,r1;c2x,c2y,r2' (default: antipodal radius 0.5)");
    cmd->add_option("--indices", args->indices_spec, "check-time indices, e.g. 0,1,2,3,4,5");
    cmd->add_option("--tau", args->tau, "itinerary time spacing")->check(CLI::PositiveNumber);
    cmd->add_option("--budget", args->budget, "cell-orbit evaluation budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-depth", args->max_depth, "quadtree depth limit")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", args->workers, "threads for batch orbit evaluation")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--reverify", args->reverify,
                    "re-integrate this many certificates at 10x finer steps");
    cmd->callback([args, &rc] { rc = run_horseshoe(*args); });
}

} // namespace torusflow::cli
