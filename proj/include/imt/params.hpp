#pragma once

#include <numbers>
#include <string>
#include <vector>

namespace imt {

// Internal unit system: hbar = 1, time in 1/Gamma, length in mm. Every
// frequency-like quantity is therefore a multiple of Gamma and every energy
// is reported as an angular frequency. SI conversion happens at I/O only.

struct GridSpec {
    int nz = 256;
    int ny = 128;
    double z_half_extent = 0.0;  ///< mm; 0 selects the default of 4 w0
    double dt = 1.0;             ///< 1/Gamma
};

struct ParamSet {
    double gamma_si = 2.0 * std::numbers::pi * 6.0e6;  ///< rad/s, the frequency unit
    double omega = 3.0;          ///< bias Rabi frequency, Gamma
    double alpha = -0.25;        ///< Gaussian fractional amplitude
    double phi = 0.0;            ///< half the backward Gaussian phase shift, rad
    double delta_p = 0.0;        ///< probe (= control) detuning, Gamma
    double w0 = 1.0;             ///< beam waist, mm
    double xi = 80.0;            ///< optical depth
    double medium_length = 5.0;  ///< L, mm
    double lambda_p = 780e-6;    ///< mm
    double lambda_c = 780e-6;    ///< mm
    GridSpec grid;

    bool operator==(const ParamSet&) const = default;
};

/// Grid half extent along z with the 4 w0 default applied.
double z_half_extent(const ParamSet& p);

struct DerivedConstants {
    double eta;       ///< light-matter coupling Gamma xi / (2 L), Gamma per mm
    double k_p;       ///< probe wavenumber, 1/mm
    double k_y;       ///< 2 pi / L, 1/mm
    double rayleigh;  ///< pi w0^2 / lambda_c, mm

    bool operator==(const DerivedConstants&) const = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate(const ParamSet& p);

DerivedConstants derive_constants(const ParamSet& p);

struct RegimeReport {
    double ratio;            ///< L_r / L
    double threshold;
    bool uniform_in_y;       ///< ratio >= threshold
    bool bound_state_expected;  ///< alpha < 0
    std::vector<std::string> warnings;
};

inline constexpr double kDefaultRegimeThreshold = 50.0;

RegimeReport validate_regime(const ParamSet& p,
                             double threshold = kDefaultRegimeThreshold);

/// Throws RegimeError when the uniform-in-y approximation does not hold.
void require_regime(const ParamSet& p, double threshold = kDefaultRegimeThreshold);

// Conversions between internal and laboratory units.
class Units {
public:
    explicit Units(double gamma_si) : gamma_(gamma_si) {}
    explicit Units(const ParamSet& p) : gamma_(p.gamma_si) {}

    double gamma_si() const { return gamma_; }
    double to_us(double t) const { return t / gamma_ * 1e6; }
    double from_us(double us) const { return us * 1e-6 * gamma_; }
    double to_seconds(double t) const { return t / gamma_; }
    /// Rate or angular frequency in Gamma to kHz (10^3 per second).
    double to_khz(double rate) const { return rate * gamma_ * 1e-3; }
    double from_khz(double khz) const { return khz * 1e3 / gamma_; }
    double to_per_second(double rate) const { return rate * gamma_; }
    double from_per_second(double r) const { return r / gamma_; }
    static double mm_to_m(double mm) { return mm * 1e-3; }
    static double m_to_mm(double m) { return m * 1e3; }

private:
    double gamma_;
};

/// Default physical point: w0 = 1 mm, xi = 80, alpha = -0.25.
ParamSet default_params();

}  // namespace imt
