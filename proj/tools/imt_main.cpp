// Command-line front end: imt --mode <mode> [--preset figN | --config file] --out dir
//                         imt compare <a.csv> <b.csv> --metric overlap|relative

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "imt/config.hpp"
#include "imt/error.hpp"
#include "imt/runner.hpp"

namespace {

int report_error(const std::string& code, const std::string& message, const std::string& out_dir) {
    const nlohmann::json rec{{"status", "error"}, {"error", {{"code", code}, {"message", message}}}};
    std::cerr << rec.dump() << "\n";
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        std::ofstream f(std::filesystem::path(out_dir) / "error.json");
        if (f) f << rec.dump(2) << "\n";
    }
    const bool input = code == "config" || code == "validation" || code == "regime" ||
                       code == "schema_mismatch" || code == "io" || code == "usage";
    return input ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inhomogeneous mass trap simulation toolkit"};
    app.set_version_flag("--version", imt::toolkit_version());

    std::string mode, config_path, preset_name, out_dir = "out";
    int workers = 1;
    std::vector<std::string> overrides;
    app.add_option("--mode", mode, "Run mode")->check(CLI::IsMember(imt::run_modes()));
    app.add_option("--config", config_path, "YAML configuration file")->check(CLI::ExistingFile);
    app.add_option("--preset", preset_name, "Built-in parameter set")
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--workers", workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--override", overrides, "section.key=value, repeatable");
    app.add_flag("--print-config", "Print the resolved configuration and exit");

    auto* cmp = app.add_subcommand("compare", "Compare two CSV artifacts");
    std::string path_a, path_b, metric = "overlap";
    cmp->add_option("a", path_a, "First CSV")->required()->check(CLI::ExistingFile);
    cmp->add_option("b", path_b, "Second CSV")->required()->check(CLI::ExistingFile);
    cmp->add_option("--metric", metric, "overlap or relative")->check(CLI::IsMember({"overlap", "relative"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage", e.what(), "");
    }

    try {
        if (cmp->parsed()) {
            std::cout << imt::compare_json(imt::compare(path_a, path_b, metric)) << "\n";
            return 0;
        }
        if (!config_path.empty() && !preset_name.empty())
            throw imt::ConfigError("--config and --preset are mutually exclusive");
        if (mode.empty() && !app.count("--print-config")) throw imt::ConfigError("--mode is required");
        if (preset_name.empty() && config_path.empty() && mode.rfind("fig", 0) == 0) preset_name = mode;
        const imt::Config cfg = !config_path.empty() ? imt::load_config(config_path, overrides)
                                : !preset_name.empty() ? imt::preset(preset_name, overrides)
                                                       : imt::parse_config("", overrides, "defaults");
        if (app.count("--print-config")) {
            std::cout << imt::canonical_form(cfg) << "hash=" << imt::config_hash(cfg) << "\n";
            return 0;
        }
        const imt::RunManifest m = imt::run(mode, cfg, out_dir, workers);
        std::cout << imt::manifest_json(m) << "\n";
        return 0;
    } catch (const imt::Error& e) {
        return report_error(e.code(), e.what(), cmp->parsed() ? "" : out_dir);
    } catch (const std::exception& e) {
        return report_error("internal", e.what(), cmp->parsed() ? "" : out_dir);
    }
}
