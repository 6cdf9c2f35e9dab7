// oqsim — batch experiment runner for the spin-bath evolve-reset simulator.
//
//   oqsim <subcommand> --config <path> [--seed N] [--out DIR] [--override k=v]...
//
// Exit codes: 0 success, 1 verification failure, 2 configuration/schema error,
// 3 numerical failure. Worker count follows OMP_NUM_THREADS.

#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "oqs/errors.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    bool has_seed = false;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CliArgs& args, bool config_required) {
    auto* opt = cmd->add_option("--config", args.config_path, "JSON run configuration");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out_dir, "output directory (created if missing)");
    cmd->add_option("--override", args.overrides,
                    "dotted-path config override, e.g. evolution.tau=20");
    cmd->add_option("--seed", args.seed, "override the config seed")
        ->each([&args](const std::string&) { args.has_seed = true; });
}

int dispatch(const std::string& name, const CliArgs& args) {
    if (name == "verify") return oqsim::cmd_verify();

    std::vector<std::string> overrides = args.overrides;
    if (args.has_seed) overrides.push_back("seed=" + std::to_string(args.seed));

    oqsim::RunContext ctx{oqsim::load_config(args.config_path, overrides), args.out_dir};
    std::filesystem::create_directories(args.out_dir);

    if (name == "relax") return oqsim::cmd_relax(ctx);
    if (name == "rate-scan") return oqsim::cmd_rate_scan(ctx);
    if (name == "dephase") return oqsim::cmd_dephase(ctx);
    if (name == "resources") return oqsim::cmd_resources(ctx);
    throw std::logic_error("unknown subcommand " + name);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-bath evolve-reset simulator"};
    app.require_subcommand(1);

    CliArgs args;
    add_common(app.add_subcommand("relax", "evolve-reset relaxation run with fitted T1/T2"), args,
               true);
    add_common(app.add_subcommand("rate-scan",
                                  "sweep the system frequency and compare relaxation rates"),
               args, true);
    add_common(app.add_subcommand("dephase", "telegraph-noise dephasing ensemble run"), args, true);
    add_common(app.add_subcommand("resources", "qubit and operation-count report"), args, true);
    app.add_subcommand("verify", "run the built-in property and oracle checks");

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return dispatch(name, args);
    } catch (const oqs::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const oqs::numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
