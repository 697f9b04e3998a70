#include <cmath>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "json.hpp"

namespace torusflow::cli {

namespace {

struct OuCheckArgs {
    CommonOpts common;
    std::int64_t steps = 100000;
    std::int64_t burn_in_steps = -1;  // -1: derive from cfg.burn_in
};

int run_ou_check(const OuCheckArgs& args) {
    const RunConfig cfg = resolve_config(args.common);
    const SimParams p = sim_params(cfg);
    const ForcingSpec fs = forcing_spec(cfg);
    const auto outdir = resolve_outdir(args.common);
    const std::int64_t burn =
        args.burn_in_steps >= 0
            ? args.burn_in_steps
            : static_cast<std::int64_t>(std::llround(cfg.burn_in / p.dt));

    ManifestInfo info;
    info.subcommand = "ou-check";
    info.config = cfg;
    info.extras.emplace_back("steps", std::to_string(args.steps));
    info.extras.emplace_back("burn_in_steps", std::to_string(burn));
    info.outputs = {"ou_check.json"};
    const std::string digest = config_digest(info);
    const auto manifest_path = (outdir / "manifest.json").string();
    write_manifest_started(manifest_path, info);

    try {
        const OuCheckReport rep = ou_check(p, fs, cfg.seed, args.steps, burn);

        nlohmann::ordered_json out;
        out["config_digest"] = digest;
        out["software"] = kSoftwareVersion;
        out["steps"] = rep.steps;
        out["burn_in_steps"] = burn;
        out["worst_rel_dev"] = rep.worst_rel_dev;
        out["worst_mode"] = {rep.worst_mode.k1, rep.worst_mode.k2};
        out["worst_naive_rel_dev"] = rep.worst_naive_rel_dev;
        auto rows = nlohmann::ordered_json::array();
        for (const OuModeStat& m : rep.modes) {
            nlohmann::ordered_json r;
            r["k"] = {m.k.k1, m.k.k2};
            r["target_variance"] = m.target_variance;
            r["innovation_variance"] = m.innovation_variance;
            r["naive_variance"] = m.naive_variance;
            r["lag_autocorr"] = m.lag_autocorr;
            r["lag_autocorr_target"] = m.lag_autocorr_target;
            rows.push_back(std::move(r));
        }
        out["modes"] = std::move(rows);
        std::ofstream js(outdir / "ou_check.json");
        js << out.dump(2) << "\n";
    } catch (const std::exception& e) {
        write_manifest_finished(manifest_path, info, false, e.what());
        throw;
    }
    write_manifest_finished(manifest_path, info, true);
    return 0;
}

} // namespace

void register_ou_check(CLI::App& app, int& rc) {
    auto args = std::make_shared<OuCheckArgs>();
    CLI::App* cmd = app.add_subcommand(
        "ou-check",
        "linear-subsystem statistics vs closed-form Ornstein-Uhlenbeck values");
    add_common_options(cmd, args->common);
    cmd->add_option("--steps", args->steps, "measurement steps")->check(CLI::PositiveNumber);
    cmd->add_option("--burn-in-steps", args->burn_in_steps,
                    "burn-in steps (default: burn_in time / dt)");
    cmd->callback([args, &rc] { rc = run_ou_check(*args); });
}

} // namespace torusflow::cli
