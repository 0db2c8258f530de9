// surfnoise — surface-noise and decoherence toolbox CLI

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "surfnoise/errors.hpp"
#include "surfnoise/runner.hpp"

namespace {

int exit_code_for(const std::string& category) {
    if (category == "config") return 2;
    if (category == "quadrature") return 4;
    if (category == "integrator") return 5;
    if (category == "io") return 6;
    return 3;  // domain-type errors
}

int resolve_threads(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("SURFNOISE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"surfnoise: surface-induced decoherence and heating toolbox"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;

    const std::vector<std::string> requests = {"kernel", "psd",     "rate",    "scan",
                                               "evolve", "heating", "thomson", "check"};
    for (const auto& name : requests) {
        auto* sub = app.add_subcommand(name, "run the '" + name + "' computation");
        sub->add_option("-c,--config", config_path, "scenario config file (JSON)")->required();
        sub->add_option("-o,--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads (or SURFNOISE_THREADS)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        auto scenario = surfnoise::cli::load_scenario(config_path);
        const std::string request = app.get_subcommands().front()->get_name();
        const auto kind = surfnoise::cli::compute_kind_from_name(request);
        surfnoise::cli::RunOptions options;
        if (request == "check") {
            // check accepts any scenario and only reports validity
            options.check_only = true;
        } else if (scenario.compute.kind != *kind) {
            throw surfnoise::ConfigError("config requests '" +
                                         std::string(surfnoise::cli::compute_kind_name(
                                             scenario.compute.kind)) +
                                         "' but the subcommand is '" + request + "'");
        }
        options.out_dir = out_dir;
        options.threads = resolve_threads(threads);
        const auto result = surfnoise::cli::run(scenario, options);
        for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
        return 0;
    } catch (const surfnoise::Error& e) {
        std::cerr << "error: category=" << e.category() << ": " << e.what() << "\n";
        return exit_code_for(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: category=internal: " << e.what() << "\n";
        return 1;
    }
}
