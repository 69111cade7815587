#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "viscowave/experiment.hpp"

namespace {

int effective_jobs(int flag_jobs) {
    if (const char* env = std::getenv("VISCOWAVE_JOBS")) {
        try {
            const int jobs = std::stoi(env);
            if (jobs >= 1) return jobs;
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring malformed VISCOWAVE_JOBS='" << env << "'\n";
    }
    if (flag_jobs >= 1) return flag_jobs;
    const unsigned hardware = std::thread::hardware_concurrency();
    return hardware > 0 ? static_cast<int>(hardware) : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"viscowave: viscoelastic wave simulator and regime diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    int jobs_flag = 0;
    int levels = 3;

    auto* run_cmd = app.add_subcommand("run", "execute one experiment and write its artifacts");
    run_cmd->add_option("config", config_path, "configuration file")->required();
    run_cmd->add_option("--output", output_override, "output directory (overrides the config)");

    auto* sweep_cmd =
        app.add_subcommand("sweep", "execute the Cartesian product of the ranged keys");
    sweep_cmd->add_option("config", config_path, "configuration file")->required();
    sweep_cmd->add_option("--output", output_override, "output directory (overrides the config)");
    sweep_cmd->add_option("--jobs", jobs_flag, "concurrent cells (VISCOWAVE_JOBS overrides)");

    auto* refine_cmd =
        app.add_subcommand("refine", "dt-halving study of the energy-identity residual");
    refine_cmd->add_option("config", config_path, "configuration file")->required();
    refine_cmd->add_option("--levels", levels, "number of halving levels")->capture_default_str();
    refine_cmd->add_option("--output", output_override, "output directory (overrides the config)");

    auto* sobolev_cmd =
        app.add_subcommand("sobolev", "print the embedding constant B for the configured mesh");
    sobolev_cmd->add_option("config", config_path, "configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const viscowave::ParsedConfig parsed = viscowave::parse_config(config_path);
        const std::string output =
            !output_override.empty() ? output_override : parsed.output_dir;

        if (run_cmd->parsed())
            return viscowave::run_experiment(parsed.sim, output, std::cout);
        if (sweep_cmd->parsed())
            return viscowave::sweep_experiment(parsed, output, effective_jobs(jobs_flag),
                                               std::cout);
        if (refine_cmd->parsed())
            return viscowave::refine_experiment(parsed, output, levels, std::cout);
        if (sobolev_cmd->parsed()) {
            const viscowave::DiscreteModel model = viscowave::build_model(parsed.sim.model);
            std::cout << viscowave::format_value(viscowave::sobolev_constant_B(model)) << "\n";
            return 0;
        }
    } catch (const viscowave::ConfigError& error) {
        std::cerr << "configuration error: " << error.what() << "\n";
        return 1;
    } catch (const viscowave::IoError& error) {
        std::cerr << "io error: " << error.what() << "\n";
        return 2;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
