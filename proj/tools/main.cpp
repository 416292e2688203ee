// Command-line driver for the single-trace transmission inversion
// experiments. Exit codes: 0 success, 1 configuration/validation failure,
// 2 numerical failure.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "traceinv/traceinv.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    long long threads = -1;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-trace transmission inversion experiments"};
    app.require_subcommand(1);

    const std::pair<std::string, std::string> subcommands[] = {
        {"validate", "check geometry and scenario consistency"},
        {"synth", "write the synthesized data, signal, and noise traces"},
        {"sweep-fwi", "fixed-support least-squares misfit over the slowness grid"},
        {"sweep-ext", "penalty-extended objective/gradient over slowness and weights"},
        {"gradcheck", "analytic vs finite-difference vs operator-form gradients"},
        {"scan", "locate stationary points of the reduced objective"},
        {"invert", "discrepancy-driven inversion from a configured start"},
        {"noise-study", "stationary points vs the noise error bound across seeds"},
        {"two-event", "symmetry demo with a second arrival as 100% noise"},
        {"bounds", "evaluate every localization bound at the scenario numbers"},
    };

    CliArgs args;
    for (const auto& [name, desc] : subcommands) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", args.config_path, "key = value configuration file")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", args.out_dir, "output directory (default: config out_dir)");
        sub->add_option("--seed", args.seed, "override the noise seed");
        sub->add_option("--threads", args.threads, "override the worker count");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        traceinv::RunConfig cfg = args.config_path.empty()
                                      ? traceinv::default_config()
                                      : traceinv::load_config(args.config_path);
        if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
        if (args.seed >= 0) cfg.seed = static_cast<unsigned long long>(args.seed);
        if (args.threads >= 0) cfg.threads = static_cast<std::size_t>(args.threads);
        const std::string name = app.get_subcommands().front()->get_name();
        return traceinv::run_subcommand(name, cfg);
    } catch (const traceinv::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
