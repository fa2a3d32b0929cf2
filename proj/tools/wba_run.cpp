// wba: run one experiment described by a config file.
//
//   wba --config configs/two_wave_dig.cfg [--out DIR] [--workers N]
//       [--strict] [--threshold X] [--quiet]

#include "wba/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    using namespace wba::cli;

    CLI::App app{"Weighted Birkhoff averages: chaos detection and rotation numbers for flows"};
    std::string config_path;
    std::string out_dir;
    unsigned workers = 0;
    bool strict = false;
    bool quiet = false;
    bool print_config = false;
    std::optional<double> threshold;
    app.add_option("--config", config_path, "Run configuration file")->required();
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.add_option("--workers", workers, "Worker threads (default: $WBA_WORKERS or all cores)");
    app.add_flag("--strict", strict, "Exit nonzero when any grid point fails to integrate");
    app.add_option("--threshold", threshold, "Chaos threshold on maxdig (overrides the config)");
    app.add_flag("--quiet", quiet, "Do not print the summary line");
    app.add_flag("--print-config", print_config, "Print the fully resolved config and exit");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "io error: cannot read " << config_path << '\n';
        return kExitIo;
    }
    std::stringstream text;
    text << in.rdbuf();

    RunConfig config;
    try {
        config = parse_config(text.str());
    } catch (ConfigError const& e) {
        for (auto const& d : e.diagnostics()) std::cerr << config_path << ": " << d.str() << '\n';
        return kExitValidation;
    }
    if (!out_dir.empty()) config.output = out_dir;
    if (workers > 0) config.workers = workers;
    if (strict) config.strict = true;
    if (threshold) config.threshold = *threshold;

    if (print_config) {
        auto const diags = validate(config);
        for (auto const& d : diags) std::cerr << d.str() << '\n';
        std::cout << render_config(config);
        return diags.empty() ? kExitOk : kExitValidation;
    }
    return dispatch(config, std::cout, std::cerr, {.quiet = quiet});
}
