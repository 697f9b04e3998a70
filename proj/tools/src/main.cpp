// torusflow: spectral stochastic Navier-Stokes on the 2-torus, passive-tracer
// chaos diagnostics, and certified itinerary search.
//
// Exit codes: 0 success, 2 validation / usage error, 3 numerical instability,
// 4 itinerary search ran out of budget or depth before deciding every word.

#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "commands.hpp"
#include "torusflow/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"stochastic 2D Navier-Stokes laboratory: simulation, tracers, "
                 "Lyapunov spectra, and certified symbolic dynamics"};
    app.require_subcommand(1);

    int rc = 0;
    torusflow::cli::register_simulate(app, rc);
    torusflow::cli::register_ou_check(app, rc);
    torusflow::cli::register_advect(app, rc);
    torusflow::cli::register_lyapunov(app, rc);
    torusflow::cli::register_horseshoe(app, rc);
    torusflow::cli::register_density(app, rc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const torusflow::validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const torusflow::instability_error& e) {
        std::fprintf(stderr, "numerical instability: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return rc;
}
