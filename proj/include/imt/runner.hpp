#pragma once

#include <map>
#include <string>
#include <vector>

#include "imt/config.hpp"

namespace imt {

struct RunManifest {
    std::string config_hash;
    std::string version;
    std::string timestamp;  ///< UTC, ISO 8601
    std::string mode;
    Config config;
    std::vector<std::string> outputs;  ///< file names relative to the output directory
    std::vector<std::string> warnings;
};

const std::vector<std::string>& run_modes();
std::string toolkit_version();

/// Executes one mode and writes its CSV artifacts plus manifest.json into out_dir.
/// Sweep points are distributed over `workers` threads and merged in parameter order.
RunManifest run(const std::string& mode, const Config& cfg, const std::string& out_dir,
                int workers = 1);

std::string manifest_json(const RunManifest& m);

/// Sets a physics parameter by its config key; throws ConfigError for unknown names.
void set_parameter(ParamSet& p, const std::string& name, double value);

struct CompareReport {
    std::string metric;
    double value = 0.0;      ///< overlap, or the largest relative error
    double deviation = 0.0;  ///< phase-aligned L2 distance, or the largest absolute error
    std::map<std::string, double> per_column;  ///< relative error per column
};

/// metric "overlap" compares two imt.profile/v1 tables (z_mm, re, im); metric
/// "relative" compares every shared column of two tables with the same schema.
/// Throws SchemaMismatchError for incompatible inputs.
CompareReport compare(const std::string& path_a, const std::string& path_b,
                      const std::string& metric);

std::string compare_json(const CompareReport& r);

}  // namespace imt
