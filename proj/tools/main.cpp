// Command-line front end: one subcommand per pipeline mode.
//
// Exit codes: 0 success, 2 validation error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sjx/errors.hpp"
#include "sjx/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
    long long seed = -1;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "JSON run configuration");
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--seed", args.seed, "RNG seed");
    cmd->add_option("--threads", args.threads,
                    "worker threads (1 forces bitwise-deterministic order); "
                    "default from SJX_THREADS or hardware");
    cmd->add_option("--override", args.overrides,
                    "dotted-path override, e.g. junction.Delta=0.02")
        ->take_all();
}

sjx::RunSpec load_spec(const CommonArgs& args, sjx::RunMode mode) {
    sjx::RunSpec spec;
    if (!args.config.empty()) {
        std::ifstream in(args.config);
        if (!in) {
            throw sjx::ValidationError("cannot open config " + args.config);
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        spec = sjx::parse_runspec(ss.str());
    }
    spec.mode = mode;
    for (const auto& kv : args.overrides) sjx::apply_override(spec, kv);
    if (!args.out.empty()) spec.out_dir = args.out;
    if (args.seed >= 0) spec.seed = static_cast<std::uint64_t>(args.seed);
    if (args.threads >= 0) spec.threads = args.threads;
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-junction transport simulator"};
    app.require_subcommand(1);

    const std::map<std::string, sjx::RunMode> modes = {
        {"correlations", sjx::RunMode::correlations},
        {"born", sjx::RunMode::born},
        {"kubo", sjx::RunMode::kubo},
        {"steady", sjx::RunMode::steady},
        {"spectral", sjx::RunMode::spectral},
        {"rectify", sjx::RunMode::rectify},
        {"oracle", sjx::RunMode::oracle},
        {"sweep", sjx::RunMode::sweep},
    };
    const std::map<std::string, std::string> help = {
        {"correlations", "tabulate lead correlation kernels and decay rates"},
        {"born", "integrate the time-nonlocal master equation and its current"},
        {"kubo", "linear-response current with frozen correlators"},
        {"steady", "algebraic steady states (global and local generators)"},
        {"spectral", "nonequilibrium spectral function from the steady state"},
        {"rectify", "paired +Delta/-Delta runs, rectification and diode factor"},
        {"oracle", "exact statevector evolution, optionally with stochastic "
                   "absorbing boundaries"},
        {"sweep", "run a mode over a parameter grid"},
    };

    std::map<std::string, CommonArgs> args;
    for (const auto& [name, mode] : modes) {
        auto* cmd = app.add_subcommand(name, help.at(name));
        add_common(cmd, args[name]);
    }

    CLI11_PARSE(app, argc, argv);

    const std::string chosen = app.get_subcommands().front()->get_name();
    try {
        auto spec = load_spec(args[chosen], modes.at(chosen));
        auto bundle = sjx::run(spec);
        std::printf("wrote %zu artifact(s) to %s in %.2f s\n",
                    bundle.artifacts.size(), spec.out_dir.c_str(),
                    bundle.wall_seconds);
        for (const auto& w : bundle.warnings) {
            std::fprintf(stderr, "warning: %s\n", w.c_str());
        }
        return 0;
    } catch (const sjx::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const sjx::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
