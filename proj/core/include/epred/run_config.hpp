#pragma once

#include "epred/invariance.hpp"
#include "epred/systems.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace epred {

// JSON config contract of the command-line front end. Parsing is strict:
// unknown keys anywhere in the document are rejected.

struct HPathSpec {
    std::string family; // rotation_s1 | so3 | const_gauge
    ThetaSchedule schedule;
    Eigen::Vector3d axis{0, 0, 1}; // so3 / const_gauge
};

struct CheckSpec {
    std::string check; // lagrangian_invariance | derivative_equivariance |
                       // residual_equivariance | solution_transport |
                       // reference_match | conservation
    std::optional<HPathSpec> h_path; // omitted: run over the system catalog
    bool expect_fail = false;        // designed negative control
};

struct OutputSpec {
    std::string dir = ".";
    std::string trajectory_format = "csv"; // csv | json
    std::string report = "report.json";
};

struct RunConfig {
    std::string system;
    SystemParams params;
    std::optional<double> time_T;
    std::optional<double> time_dt;
    std::string init_preset = "default";
    std::optional<Eigen::VectorXd> init_xi;
    std::optional<Eigen::VectorXd> init_a;
    std::uint64_t seed = 42;
    std::vector<CheckSpec> checks;
    OutputSpec output;
};

/// Parse and validate a config document. Throws ConfigError on malformed
/// JSON, unknown keys, missing required keys, or out-of-range values.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

HPath make_h_path(const SystemBundle& system, const HPathSpec& spec);

/// Integrate and write the trajectory (CSV or JSON) plus a summary JSON with
/// conserved-quantity drifts, the final state and wall time. Returns 0;
/// throws NumericalError on integration aborts.
int cmd_run(const RunConfig& config);

/// Run the configured verification checks and write the JSON report.
/// Returns 0 iff every check lands as expected (pass, or fail when marked
/// expect_fail), else 1. Reports are byte-identical for identical configs.
int cmd_verify(const RunConfig& config);

/// Repeat the run across parameter values (dt or N), compute observed
/// convergence orders against the finest run, write the JSON table.
/// EPRED_THREADS caps parallelism. Returns 0.
int cmd_sweep(const RunConfig& config, const std::string& param,
              const std::vector<double>& values);

} // namespace epred
