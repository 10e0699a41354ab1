#pragma once

#include <string>
#include <vector>

#include "imt/grid.hpp"
#include "imt/params.hpp"

namespace imt {

// Values not covered by ParamSet, all in internal units.
struct RunSettings {
    double duration = 5655.0;       ///< 1/Gamma, 150 us at the default Gamma
    double sample_interval = 18.85; ///< 1/Gamma, 0.5 us
    double z0 = 0.5;                ///< coherent-state displacement, mm
    int modes = 4;
    double relax_tol = 1e-6;
    int relax_max_steps = 20000;
    std::string sweep_parameter = "phi";
    RVec sweep_values;              ///< internal units of sweep_parameter
    RVec detunings;                 ///< Gamma
    RVec alphas;
    RVec phis;                      ///< rad
    RVec snapshot_times;               ///< 1/Gamma

    bool operator==(const RunSettings&) const = default;
};

struct Config {
    ParamSet params;
    RunSettings run;
    std::string source;  ///< file path or preset name
};

/// Parses "<number> <unit>" into internal units for the given dimension:
/// "frequency", "length", "time", "angle" or "dimensionless". The number may
/// carry a "<k>pi*" prefix, as in "2pi*6 MHz".
double parse_quantity(const std::string& text, const std::string& dimension, double gamma_si = 0.0,
                      double w0 = 0.0);

Config load_config(const std::string& path, const std::vector<std::string>& overrides = {});
Config parse_config(const std::string& yaml_text, const std::vector<std::string>& overrides = {},
                    const std::string& source = "<string>");
/// Built-in parameter sets fig1 .. fig4.
Config preset(const std::string& name, const std::vector<std::string>& overrides = {});
std::string preset_yaml(const std::string& name);

/// Sorted key=value lines of the resolved configuration in internal units.
std::string canonical_form(const Config& c);
/// SHA-256 of canonical_form, hex encoded.
std::string config_hash(const Config& c);

}  // namespace imt
