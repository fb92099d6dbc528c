// epred: Euler-Poincare reduction runner and verification harness.
//
//   epred run <config.json>
//   epred verify <config.json>
//   epred sweep <config.json> --param dt --values 4e-3,2e-3,1e-3
//
// Exit codes: 0 success, 1 verification failure, 2 config error,
// 3 numerical abort.

#include "epred/run_config.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw epred::ConfigError("sweep: bad value '" + item + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler-Poincare reduction on Lie groups and homogeneous spaces"};
    app.require_subcommand(1);

    std::string config_path;
    std::string sweep_param = "dt";
    std::string sweep_values;

    CLI::App* run = app.add_subcommand("run", "integrate a system and write the trajectory");
    run->add_option("config", config_path, "JSON config file")->required();

    CLI::App* verify = app.add_subcommand("verify", "run the invariance verification suite");
    verify->add_option("config", config_path, "JSON config file")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "convergence sweep over dt or N");
    sweep->add_option("config", config_path, "JSON config file")->required();
    sweep->add_option("--param", sweep_param, "dt or N")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const epred::RunConfig cfg = epred::load_run_config(config_path);
        if (run->parsed()) return epred::cmd_run(cfg);
        if (verify->parsed()) return epred::cmd_verify(cfg);
        const int rc = epred::cmd_sweep(cfg, sweep_param, parse_values(sweep_values));
        if (rc == 0) {
            std::ifstream table(std::filesystem::path(cfg.output.dir) /
                                ("sweep_" + sweep_param + ".json"));
            std::cout << table.rdbuf();
        }
        return rc;
    } catch (const epred::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const epred::ShapeError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const epred::NumericalError& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
