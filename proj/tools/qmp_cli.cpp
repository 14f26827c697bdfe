// Command-line driver: check | sweep | mean-dependence, each taking a JSON
// config and writing machine-readable reports. Exit codes: 0 pass, 1 invariant
// failure, 2 configuration error.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qmp/harness.hpp"
#include "qmp/version.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int threads = 1;
};

void add_common(CLI::App *cmd, CommonArgs &args, bool with_threads = true) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "seed for the randomized suites");
    if (with_threads) {
        cmd->add_option("--threads", args.threads, "worker threads for sweep points")
            ->check(CLI::PositiveNumber);
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"canonical pointer-measurement simulator"};
    app.set_version_flag("--version", std::string(qmp::kVersion));
    app.require_subcommand(1);

    CommonArgs check_args, sweep_args, md_args;
    CLI::App *check = app.add_subcommand("check", "run the invariant and oracle suites");
    add_common(check, check_args);
    CLI::App *sweep = app.add_subcommand("sweep", "convergence sweep over preparation widths");
    add_common(sweep, sweep_args);
    CLI::App *md = app.add_subcommand("mean-dependence",
                                      "compare two invariant-mean kernels on one observable");
    add_common(md, md_args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) {
            const auto config = qmp::load_config_file(check_args.config_path);
            return qmp::run_check(config, check_args.out_dir, check_args.seed,
                                  check_args.threads, std::cout);
        }
        if (sweep->parsed()) {
            const auto config = qmp::load_config_file(sweep_args.config_path);
            return qmp::run_sweep(config, sweep_args.out_dir, sweep_args.seed,
                                  sweep_args.threads, std::cout);
        }
        const auto config = qmp::load_config_file(md_args.config_path);
        return qmp::run_mean_dependence(config, md_args.out_dir, md_args.seed, std::cout);
    } catch (const qmp::ConfigError &e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const qmp::Error &e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
