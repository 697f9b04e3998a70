#pragma once

// One registrar per subcommand.  Each wires its flags onto a CLI::App
// subcommand and installs a callback that runs the command and stores the
// exit code in `rc` (validation and instability errors propagate as
// exceptions and are mapped in main).

namespace CLI {
class App;
}

namespace torusflow::cli {

void register_simulate(CLI::App& app, int& rc);
void register_ou_check(CLI::App& app, int& rc);
void register_advect(CLI::App& app, int& rc);
void register_lyapunov(CLI::App& app, int& rc);
void register_horseshoe(CLI::App& app, int& rc);
void register_density(CLI::App& app, int& rc);

} // namespace torusflow::cli
