#include "imt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "imt/error.hpp"

namespace imt {

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok) {
    static const std::regex pi_prefix(R"(^([-+]?[0-9]*\.?[0-9]*(?:[eE][-+]?[0-9]+)?)pi\*(.+)$)");
    std::smatch m;
    double factor = 1.0;
    std::string rest = tok;
    if (std::regex_match(tok, m, pi_prefix)) {
        const std::string k = m[1].str();
        factor = pi * (k.empty() || k == "+" ? 1.0 : k == "-" ? -1.0 : std::stod(k));
        rest = m[2].str();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(rest, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + tok + "'");
    }
    if (used != rest.size()) throw ConfigError("not a number: '" + tok + "'");
    return factor * v;
}

const std::map<std::string, std::string>& dimension_of() {
    static const std::map<std::string, std::string> m{
        {"physics.gamma", "frequency"},      {"physics.omega", "frequency"},
        {"physics.alpha", "dimensionless"},  {"physics.phi", "angle"},
        {"physics.delta_p", "frequency"},    {"physics.w0", "length"},
        {"physics.xi", "dimensionless"},     {"physics.medium_length", "length"},
        {"physics.lambda_p", "length"},      {"physics.lambda_c", "length"},
        {"grid.nz", "integer"},              {"grid.ny", "integer"},
        {"grid.z_half_extent", "length"},    {"grid.dt", "time"},
        {"run.duration", "time"},            {"run.sample_interval", "time"},
        {"run.z0", "length"},                {"run.modes", "integer"},
        {"run.relax_tol", "dimensionless"},  {"run.relax_max_steps", "integer"},
        {"run.sweep", "table"},              {"run.detunings", "frequency-list"},
        {"run.alphas", "dimensionless-list"}, {"run.phis", "angle-list"},
        {"run.snapshot_times", "time-list"},
    };
    return m;
}

std::string sweep_dimension(const std::string& param) {
    const auto it = dimension_of().find("physics." + param);
    if (it == dimension_of().end()) throw ConfigError("cannot sweep unknown parameter '" + param + "'");
    return it->second;
}

std::string resolve_key(const std::string& key) {
    if (key.find('.') != std::string::npos) {
        if (!dimension_of().count(key)) throw ConfigError("unknown key '" + key + "'");
        return key;
    }
    for (const char* sec : {"physics.", "grid.", "run."})
        if (dimension_of().count(sec + key)) return sec + key;
    throw ConfigError("unknown key '" + key + "'");
}

struct Reader {
    double gamma_si;
    double w0;

    double scalar(const YAML::Node& n, const std::string& dim, const std::string& key) const {
        if (!n.IsScalar()) throw ConfigError(key + " must be a scalar");
        try {
            return parse_quantity(n.as<std::string>(), dim, gamma_si, w0);
        } catch (const ConfigError& e) {
            throw ConfigError(key + ": " + e.what());
        }
    }

    RVec list(const YAML::Node& n, const std::string& dim, const std::string& key) const {
        if (!n.IsSequence()) throw ConfigError(key + " must be a list");
        RVec v;
        for (const auto& e : n) v.push_back(scalar(e, dim, key));
        return v;
    }
};

int integer(const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar()) throw ConfigError(key + " must be an integer");
    const std::string s = trim(n.as<std::string>());
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + " must be an integer");
    }
    if (used != s.size()) throw ConfigError(key + " must be an integer");
    return static_cast<int>(v);
}

Config build(const YAML::Node& root, const std::string& source) {
    if (!root.IsMap()) throw ConfigError("configuration root must be a table");
    for (const auto& sec : root) {
        const std::string name = sec.first.as<std::string>();
        if (name != "physics" && name != "grid" && name != "run")
            throw ConfigError("unknown section '" + name + "'");
        if (!sec.second.IsMap()) throw ConfigError("section '" + name + "' must be a table");
        for (const auto& kv : sec.second) {
            const std::string key = name + "." + kv.first.as<std::string>();
            if (!dimension_of().count(key)) throw ConfigError("unknown key '" + key + "'");
        }
    }
    Config c;
    c.source = source;
    ParamSet& p = c.params;
    const YAML::Node ph = root["physics"], gr = root["grid"], rn = root["run"];

    Reader rd{p.gamma_si, 0.0};
    if (ph && ph["gamma"]) {
        const std::string g = ph["gamma"].as<std::string>();
        if (g.find("Gamma") != std::string::npos) throw ConfigError("gamma cannot be given in units of itself");
        p.gamma_si = parse_quantity(g, "frequency", 1.0);
        rd.gamma_si = p.gamma_si;
    }
    if (ph) {
        if (ph["omega"]) p.omega = rd.scalar(ph["omega"], "frequency", "physics.omega");
        if (ph["alpha"]) p.alpha = rd.scalar(ph["alpha"], "dimensionless", "physics.alpha");
        if (ph["phi"]) p.phi = rd.scalar(ph["phi"], "angle", "physics.phi");
        if (ph["delta_p"]) p.delta_p = rd.scalar(ph["delta_p"], "frequency", "physics.delta_p");
        if (ph["w0"]) p.w0 = rd.scalar(ph["w0"], "length", "physics.w0");
        if (ph["xi"]) p.xi = rd.scalar(ph["xi"], "dimensionless", "physics.xi");
        if (ph["medium_length"]) p.medium_length = rd.scalar(ph["medium_length"], "length", "physics.medium_length");
        if (ph["lambda_p"]) p.lambda_p = rd.scalar(ph["lambda_p"], "length", "physics.lambda_p");
        if (ph["lambda_c"]) p.lambda_c = rd.scalar(ph["lambda_c"], "length", "physics.lambda_c");
    }
    rd.w0 = p.w0;
    if (gr) {
        if (gr["nz"]) p.grid.nz = integer(gr["nz"], "grid.nz");
        if (gr["ny"]) p.grid.ny = integer(gr["ny"], "grid.ny");
        if (gr["z_half_extent"]) p.grid.z_half_extent = rd.scalar(gr["z_half_extent"], "length", "grid.z_half_extent");
        if (gr["dt"]) p.grid.dt = rd.scalar(gr["dt"], "time", "grid.dt");
    }
    RunSettings& r = c.run;
    r.duration = parse_quantity("150 us", "time", p.gamma_si);
    r.sample_interval = parse_quantity("0.5 us", "time", p.gamma_si);
    if (rn) {
        if (rn["duration"]) r.duration = rd.scalar(rn["duration"], "time", "run.duration");
        if (rn["sample_interval"]) r.sample_interval = rd.scalar(rn["sample_interval"], "time", "run.sample_interval");
        if (rn["z0"]) r.z0 = rd.scalar(rn["z0"], "length", "run.z0");
        if (rn["modes"]) r.modes = integer(rn["modes"], "run.modes");
        if (rn["relax_tol"]) r.relax_tol = rd.scalar(rn["relax_tol"], "dimensionless", "run.relax_tol");
        if (rn["relax_max_steps"]) r.relax_max_steps = integer(rn["relax_max_steps"], "run.relax_max_steps");
        if (rn["detunings"]) r.detunings = rd.list(rn["detunings"], "frequency", "run.detunings");
        if (rn["alphas"]) r.alphas = rd.list(rn["alphas"], "dimensionless", "run.alphas");
        if (rn["phis"]) r.phis = rd.list(rn["phis"], "angle", "run.phis");
        if (rn["snapshot_times"]) r.snapshot_times = rd.list(rn["snapshot_times"], "time", "run.snapshot_times");
        if (const YAML::Node sw = rn["sweep"]) {
            if (!sw.IsMap() || !sw["parameter"]) throw ConfigError("run.sweep needs a parameter");
            r.sweep_parameter = sw["parameter"].as<std::string>();
            const std::string dim = sweep_dimension(r.sweep_parameter);
            if (sw["values"]) {
                r.sweep_values = rd.list(sw["values"], dim, "run.sweep.values");
            } else if (sw["from"] && sw["to"] && sw["count"]) {
                const double a = rd.scalar(sw["from"], dim, "run.sweep.from");
                const double b = rd.scalar(sw["to"], dim, "run.sweep.to");
                const int n = integer(sw["count"], "run.sweep.count");
                if (n < 1) throw ConfigError("run.sweep.count must be positive");
                for (int k = 0; k < n; ++k) r.sweep_values.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
            } else {
                throw ConfigError("run.sweep needs values or from/to/count");
            }
        }
    }
    if (!(r.duration >= 0.0) || !(r.sample_interval > 0.0)) throw ConfigError("run times must be positive");
    if (r.modes < 1) throw ConfigError("run.modes must be positive");
    validate(p);
    return c;
}

void apply_overrides(YAML::Node& root, const std::vector<std::string>& overrides) {
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + o + "' lacks '='");
        const std::string key = resolve_key(trim(o.substr(0, eq)));
        const std::string value = trim(o.substr(eq + 1));
        const auto dot = key.find('.');
        const std::string sec = key.substr(0, dot), name = key.substr(dot + 1);
        YAML::Node parsed;
        try {
            parsed = YAML::Load(value);
        } catch (const YAML::Exception& e) {
            throw ConfigError("override '" + o + "': " + e.what());
        }
        if (!root[sec]) root[sec] = YAML::Node(YAML::NodeType::Map);
        root[sec][name] = parsed.IsSequence() || parsed.IsMap() ? parsed : YAML::Node(value);
    }
}

}  // namespace

double parse_quantity(const std::string& text, const std::string& dim, double gamma_si, double w0) {
    const std::string s = trim(text);
    const auto sp = s.find_first_of(" \t");
    const std::string num = sp == std::string::npos ? s : s.substr(0, sp);
    const std::string unit = sp == std::string::npos ? "" : trim(s.substr(sp));
    const double v = parse_number(num);
    if (dim == "dimensionless") {
        if (!unit.empty()) throw ConfigError("unexpected unit '" + unit + "'");
        return v;
    }
    if (unit.empty()) throw ConfigError("missing unit in '" + s + "'");
    if (dim == "frequency") {
        if (unit == "Gamma") return v;
        static const std::map<std::string, double> f{
            {"rad/s", 1.0}, {"/s", 1.0}, {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}};
        const auto it = f.find(unit);
        if (it == f.end()) throw ConfigError("unknown frequency unit '" + unit + "'");
        if (!(gamma_si > 0.0)) throw ConfigError("frequency conversion needs gamma");
        return v * it->second / gamma_si;
    }
    if (dim == "length") {
        if (unit == "w0") {
            if (!(w0 > 0.0)) throw ConfigError("w0 unit used before w0 is known");
            return v * w0;
        }
        static const std::map<std::string, double> f{{"m", 1e3}, {"mm", 1.0}, {"um", 1e-3}, {"nm", 1e-6}};
        const auto it = f.find(unit);
        if (it == f.end()) throw ConfigError("unknown length unit '" + unit + "'");
        return v * it->second;
    }
    if (dim == "time") {
        if (unit == "/Gamma") return v;
        static const std::map<std::string, double> f{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
        const auto it = f.find(unit);
        if (it == f.end()) throw ConfigError("unknown time unit '" + unit + "'");
        if (!(gamma_si > 0.0)) throw ConfigError("time conversion needs gamma");
        return v * it->second * gamma_si;
    }
    if (dim == "angle") {
        static const std::map<std::string, double> f{{"rad", 1.0}, {"pi", pi}, {"deg", pi / 180.0}};
        const auto it = f.find(unit);
        if (it == f.end()) throw ConfigError("unknown angle unit '" + unit + "'");
        return v * it->second;
    }
    throw ConfigError("unknown dimension '" + dim + "'");
}

Config parse_config(const std::string& text, const std::vector<std::string>& overrides,
                    const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(source + ": " + e.what());
    }
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    apply_overrides(root, overrides);
    try {
        return build(root, source);
    } catch (const YAML::Exception& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides, path);
}

std::string preset_yaml(const std::string& name) {
    if (name == "fig1")
        return "physics: {alpha: -0.25, phi: 0 pi, delta_p: 0 Gamma, w0: 1 mm, xi: 80}\n"
               "run:\n  detunings: [-1 Gamma, 0 Gamma, 1 Gamma]\n  alphas: [-0.25, 0.25]\n";
    if (name == "fig2")
        return "physics: {alpha: -0.25, phi: 0 pi, delta_p: 0 Gamma, w0: 1 mm, xi: 80}\n"
               "run:\n  detunings: [-0.5 Gamma, 0 Gamma, 0.5 Gamma]\n  modes: 4\n"
               "  duration: 40 us\n  relax_tol: 1e-6\n"
               "  sweep: {parameter: delta_p, from: -1 Gamma, to: 1 Gamma, count: 21}\n";
    if (name == "fig3")
        return "physics: {alpha: -0.25, phi: 0 pi, delta_p: 1 Gamma, w0: 1.5 mm, xi: 80}\n"
               "run:\n  detunings: [-2 Gamma, -1 Gamma, 0 Gamma, 1 Gamma, 2 Gamma]\n"
               "  duration: 150 us\n  sample_interval: 0.5 us\n  z0: 0.5 mm\n"
               "  snapshot_times: [2 us, 42 us, 92 us]\n";
    if (name == "fig4")
        return "physics: {alpha: -0.25, phi: 0 pi, delta_p: 1 Gamma, w0: 1.5 mm, xi: 200}\n"
               "run:\n  phis: [0 pi, 0.02 pi, 0.06 pi, 0.1 pi, 0.12 pi, 0.15 pi]\n"
               "  duration: 150 us\n"
               "  sweep: {parameter: phi, from: 0 pi, to: 0.3 pi, count: 31}\n";
    throw ConfigError("unknown preset '" + name + "'");
}

Config preset(const std::string& name, const std::vector<std::string>& overrides) {
    return parse_config(preset_yaml(name), overrides, "preset:" + name);
}

std::string canonical_form(const Config& c) {
    const ParamSet& p = c.params;
    const RunSettings& r = c.run;
    auto num = [](double v) { return fmt::format("{:.17g}", v); };
    auto list = [&](const RVec& v) {
        std::string s = "[";
        for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + num(v[k]);
        return s + "]";
    };
    std::map<std::string, std::string> kv{
        {"physics.gamma", num(p.gamma_si)},       {"physics.omega", num(p.omega)},
        {"physics.alpha", num(p.alpha)},          {"physics.phi", num(p.phi)},
        {"physics.delta_p", num(p.delta_p)},      {"physics.w0", num(p.w0)},
        {"physics.xi", num(p.xi)},                {"physics.medium_length", num(p.medium_length)},
        {"physics.lambda_p", num(p.lambda_p)},    {"physics.lambda_c", num(p.lambda_c)},
        {"grid.nz", std::to_string(p.grid.nz)},   {"grid.ny", std::to_string(p.grid.ny)},
        {"grid.z_half_extent", num(z_half_extent(p))}, {"grid.dt", num(p.grid.dt)},
        {"run.duration", num(r.duration)},        {"run.sample_interval", num(r.sample_interval)},
        {"run.z0", num(r.z0)},                    {"run.modes", std::to_string(r.modes)},
        {"run.relax_tol", num(r.relax_tol)},      {"run.relax_max_steps", std::to_string(r.relax_max_steps)},
        {"run.sweep.parameter", r.sweep_parameter}, {"run.sweep.values", list(r.sweep_values)},
        {"run.detunings", list(r.detunings)},     {"run.alphas", list(r.alphas)},
        {"run.phis", list(r.phis)},               {"run.snapshot_times", list(r.snapshot_times)},
    };
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string config_hash(const Config& c) {
    const std::string s = canonical_form(c);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw ConfigError("hashing failed");
    std::string hex;
    for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", md[k]);
    return hex;
}

}  // namespace imt
