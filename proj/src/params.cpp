#include "imt/params.hpp"

#include <cmath>
#include <sstream>

#include "imt/error.hpp"

namespace imt {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

}  // namespace

double z_half_extent(const ParamSet& p) {
    return p.grid.z_half_extent > 0.0 ? p.grid.z_half_extent : 4.0 * p.w0;
}

void validate(const ParamSet& p) {
    auto finite = [](double v) { return std::isfinite(v); };
    require(finite(p.gamma_si) && p.gamma_si > 0, "gamma must be positive");
    require(finite(p.omega) && p.omega > 0, "omega must be positive");
    require(finite(p.xi) && p.xi > 0, "xi must be positive");
    require(finite(p.w0) && p.w0 > 0, "w0 must be positive");
    require(finite(p.medium_length) && p.medium_length > 0, "medium_length must be positive");
    require(finite(p.lambda_p) && p.lambda_p > 0, "lambda_p must be positive");
    require(finite(p.lambda_c) && p.lambda_c > 0, "lambda_c must be positive");
    require(finite(p.alpha) && p.alpha > -1.0, "alpha must exceed -1");
    require(finite(p.phi) && p.phi >= 0.0 && p.phi < std::numbers::pi, "phi must lie in [0, pi)");
    require(finite(p.delta_p), "delta_p must be finite");
    require(p.grid.nz >= 8 && p.grid.ny >= 8, "grid needs nz, ny >= 8");
    require(finite(p.grid.dt) && p.grid.dt > 0, "dt must be positive");
    require(p.grid.z_half_extent == 0.0 || p.grid.z_half_extent >= 3.0 * p.w0,
            "z_half_extent must be at least 3 w0");
}

DerivedConstants derive_constants(const ParamSet& p) {
    validate(p);
    const double pi = std::numbers::pi;
    DerivedConstants d{};
    d.eta = p.xi / (2.0 * p.medium_length);
    d.k_p = 2.0 * pi / p.lambda_p;
    d.k_y = 2.0 * pi / p.medium_length;
    d.rayleigh = pi * p.w0 * p.w0 / p.lambda_c;
    return d;
}

RegimeReport validate_regime(const ParamSet& p, double threshold) {
    const DerivedConstants d = derive_constants(p);
    RegimeReport r{};
    r.ratio = d.rayleigh / p.medium_length;
    r.threshold = threshold;
    r.uniform_in_y = r.ratio >= threshold;
    r.bound_state_expected = p.alpha < 0.0;
    if (!r.uniform_in_y) {
        std::ostringstream os;
        os << "Rayleigh range to medium length ratio " << r.ratio << " below " << threshold;
        r.warnings.push_back(os.str());
    }
    if (!r.bound_state_expected) r.warnings.emplace_back("no bound state expected");
    return r;
}

void require_regime(const ParamSet& p, double threshold) {
    const RegimeReport r = validate_regime(p, threshold);
    if (!r.uniform_in_y) throw RegimeError(r.warnings.front());
}

ParamSet default_params() { return ParamSet{}; }

}  // namespace imt
