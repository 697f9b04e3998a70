#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "commands.hpp"
#include "common.hpp"
#include "json.hpp"
#include "torusflow/stats.hpp"
#include "torusflow/trajectory.hpp"

namespace torusflow::cli {

namespace {

struct SimulateArgs {
    CommonOpts common;
    std::string save_trajectory;    // container file, empty = off
    double checkpoint_every = 0.0;  // time units, 0 = off
};

int run_simulate(const SimulateArgs& args) {
    const RunConfig cfg = resolve_config(args.common);
    const SimParams p = sim_params(cfg);
    const ForcingSpec fs = forcing_spec(cfg);
    const auto outdir = resolve_outdir(args.common);

    ManifestInfo info;
    info.subcommand = "simulate";
    info.config = cfg;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g", args.checkpoint_every);
    info.extras.emplace_back("checkpoint_every", buf);
    info.outputs = {"diagnostics.csv", "state_final.txt", "summary.json"};
    if (!args.save_trajectory.empty()) info.outputs.push_back(args.save_trajectory);
    const std::string digest = config_digest(info);
    const auto manifest_path = (outdir / "manifest.json").string();
    write_manifest_started(manifest_path, info);

    bool ok = false;
    std::string failure;
    try {
        NseIntegrator integ(p, fs);
        NoiseStream noise(cfg.seed, p.dt);
        FlowState st{0, 0.0, SpectralVelocity(p.cutoff)};
        const auto burn_steps = static_cast<std::int64_t>(std::llround(cfg.burn_in / p.dt));
        const auto run_steps = static_cast<std::int64_t>(std::llround(cfg.horizon / p.dt));
        const auto ckpt_steps =
            args.checkpoint_every > 0.0
                ? static_cast<std::int64_t>(std::llround(args.checkpoint_every / p.dt))
                : 0;

        for (std::int64_t i = 0; i < burn_steps; ++i) integ.step_in_place(st, noise);

        auto csv = open_csv(outdir / "diagnostics.csv", digest,
                            "time,energy,enstrophy,hs_norm");
        auto write_row = [&](const FlowState& s) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", s.time,
                          s.field.energy(), s.field.enstrophy(),
                          s.field.sobolev_norm(cfg.sobolev));
            csv << buf;
        };
        write_row(st);

        std::unique_ptr<StoredTrajectory> traj;
        if (!args.save_trajectory.empty()) {
            traj = std::make_unique<StoredTrajectory>(p.dt);
            traj->reserve(run_steps + 1);
            traj->append(st.field);
        }

        // Lagrangian decorrelation probes: four tracers co-advected through
        // the first stretch of the recorded window.
        const TorusPoint probe_starts[4] = {
            {0.5, 1.2}, {2.2, 4.9}, {3.3, 0.7}, {5.1, 2.8}};
        const auto probe_span =
            std::min(run_steps, static_cast<std::int64_t>(std::llround(60.0 / p.dt)));
        TracerState probes[4];
        for (int t = 0; t < 4; ++t) probes[t] = {probe_starts[t], st.time};
        std::vector<std::vector<double>> probe_u;
        if (run_steps >= static_cast<std::int64_t>(std::llround(5.0 / p.dt))) {
            probe_u.reserve(probe_span + 1);
            std::vector<double> row(8);
            for (int t = 0; t < 4; ++t) {
                const Vec2 u = st.field.evaluate(probes[t].position);
                row[2 * t] = u.x;
                row[2 * t + 1] = u.y;
            }
            probe_u.push_back(row);
        }

        std::vector<double> energy_series;
        energy_series.reserve(run_steps);
        double sum_e = 0, sum_om = 0, sum_hs = 0;
        FlowState prev = st;
        for (std::int64_t i = 1; i <= run_steps; ++i) {
            integ.step_in_place(st, noise);
            if (!probe_u.empty() && i <= probe_span) {
                std::vector<double> row(8);
                for (int t = 0; t < 4; ++t) {
                    probes[t] = advect(probes[t], prev, st);
                    const Vec2 u = st.field.evaluate(probes[t].position);
                    row[2 * t] = u.x;
                    row[2 * t + 1] = u.y;
                }
                probe_u.push_back(std::move(row));
            }
            prev = st;
            const double e = st.field.energy();
            energy_series.push_back(e);
            sum_e += e;
            sum_om += st.field.enstrophy();
            sum_hs += st.field.sobolev_norm(cfg.sobolev);
            if (i % std::max(1, cfg.thin) == 0) write_row(st);
            if (traj) traj->append(st.field);
            if (ckpt_steps > 0 && i % ckpt_steps == 0 && i != run_steps) {
                std::snprintf(buf, sizeof buf, "checkpoint_%09lld.txt",
                              static_cast<long long>(st.step));
                save_field_file((outdir / buf).string(), st.field);
                info.outputs.emplace_back(buf);
            }
        }
        csv.close();
        save_field_file((outdir / "state_final.txt").string(), st.field);
        if (traj) save_trajectory_file((outdir / args.save_trajectory).string(), *traj);

        nlohmann::ordered_json summary;
        summary["config_digest"] = digest;
        summary["software"] = kSoftwareVersion;
        summary["burn_in"] = cfg.burn_in;
        summary["recorded_time"] = cfg.horizon;
        summary["steps_recorded"] = run_steps;
        summary["final_time"] = st.time;
        summary["mean_energy"] = run_steps ? sum_e / double(run_steps) : 0.0;
        summary["mean_enstrophy"] = run_steps ? sum_om / double(run_steps) : 0.0;
        summary["mean_hs_norm"] = run_steps ? sum_hs / double(run_steps) : 0.0;
        summary["final_energy"] = st.field.energy();
        if (!energy_series.empty())
            summary["energy_autocorr_time"] =
                integrated_autocorr_time(energy_series) * p.dt;
        else
            summary["energy_autocorr_time"] = nullptr;
        if (!probe_u.empty())
            summary["lagrangian_decorrelation_time"] =
                vector_efolding_autocorr_lag(probe_u) * p.dt;
        else
            summary["lagrangian_decorrelation_time"] = nullptr;
        std::ofstream js(outdir / "summary.json");
        js << summary.dump(2) << "\n";
        js.close();
        ok = true;
    } catch (const std::exception& e) {
        failure = e.what();
        write_manifest_finished(manifest_path, info, false, failure);
        throw;
    }
    write_manifest_finished(manifest_path, info, ok, failure);
    return 0;
}

} // namespace

void register_simulate(CLI::App& app, int& rc) {
    auto args = std::make_shared<SimulateArgs>();
    CLI::App* cmd = app.add_subcommand(
        "simulate", "integrate the stochastic velocity field, write diagnostics");
    add_common_options(cmd, args->common);
    cmd->add_option("--save-trajectory", args->save_trajectory,
                    "store every recorded state to this trajectory container");
    cmd->add_option("--checkpoint-every", args->checkpoint_every,
                    "write a spectral checkpoint every this many time units")
        ->check(CLI::NonNegativeNumber);
    cmd->callback([args, &rc] { rc = run_simulate(*args); });
}

} // namespace torusflow::cli
