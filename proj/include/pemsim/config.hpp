#pragma once

#include <string>
#include <vector>

#include "pemsim/grid.hpp"
#include "pemsim/plate.hpp"

namespace pemsim {

/// Thrown on malformed or invalid run configuration; the message carries
/// the file line when one applies.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed and validated run configuration. One file drives every
/// subcommand; command-specific sections have usable defaults.
struct RunConfig {
    PlateParams plate{};
    ActuatorParams actuator{};

    int grid_n = 0;
    BoundaryCondition bc = BoundaryCondition::SimplySupported;

    double R0 = 1000.0;
    bool use_actuator_capacitance = true;

    struct Dispersion {
        double k_min = 0.5;
        double k_max = 50.0;
        int samples = 200;
        bool log_spacing = false;
    } dispersion;

    struct Modal {
        int m = 1;
        int n = 1;
        bool discrete_eigenvalue = false;
        double t_span = 10.0;
        int samples = 2001;
        double R = 0.0;  ///< 0 = no shunt resistor (gamma = 0)
        double p0 = 0.01;
        double p_dot0 = 0.0;
        double q0 = 0.0;
        double q_dot0 = 0.0;
    } modal;

    struct Simulate {
        int m = 1;
        int n = 1;
        double t_span = 10.0;
        double dt = 0.0;  ///< 0 = auto, 1/200 of the mode period
        int sample_stride = 10;
        double R = 0.0;  ///< 0 = no shunt resistor
        double deflection = 0.01;  ///< initial peak deflection, fraction of edge length
    } simulate;

    struct Optimize {
        int m = 1;
        int n = 1;
        bool discrete_eigenvalue = false;
        double R_min = 1e2;
        double R_max = 1e9;
    } optimize;

    /// Cross-field validation; returns human-readable warnings (thin-plate
    /// regime, actuator larger than the sampling cell, scaling length vs
    /// plate edge). Throws ConfigError on hard violations.
    std::vector<std::string> validate() const;
};

struct LoadedConfig {
    RunConfig config;
    std::string raw;   ///< file bytes, hashed into the run manifest
    std::string path;
};

/// Parses the key/value configuration text. Unknown sections or keys,
/// duplicates and malformed values are rejected with line-precise messages.
RunConfig parse_config(const std::string& text);

LoadedConfig load_config(const std::string& path);

}  // namespace pemsim
