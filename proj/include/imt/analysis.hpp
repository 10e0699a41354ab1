#pragma once

#include <string>
#include <vector>

#include "imt/grid.hpp"

namespace imt {

struct TimeSeries {
    RVec times;  ///< microseconds, strictly increasing
    RVec values;
    std::string label;
};

void check_series(const TimeSeries& s);

struct FitResult {
    double f = 0.0;      ///< kHz
    double kappa = 0.0;  ///< kHz
    double amplitude = 0.0;
    double offset = 0.0;
    double rms_residual = 0.0;
    bool converged = false;
};

/// Mean z of |field|^2. Throws ZeroNormError for a vanishing field.
double expectation_z(const ComplexField2D& field);
/// Mean y of |field|^2 over the whole grid.
double expectation_y(const ComplexField2D& field);
/// Mean y along the z = 0 line (average of the two central rows for even nz).
double expectation_y_at_center(const ComplexField2D& field);
/// Mean of x weighted by a 1D density.
double weighted_mean(const RVec& x, const RVec& density);

RVec density_z_center(const ComplexField2D& field);  ///< |f|^2 along z at y = 0
RVec density_y_center(const ComplexField2D& field);  ///< |f|^2 along y at z = 0
/// |f|^2 summed over y times dy.
RVec density_z_marginal(const ComplexField2D& field);

struct PeakReport {
    bool split = false;
    std::vector<int> peaks;  ///< indices of maxima at or above 20% of the global peak
};

/// Two or more maxima of at least 20% of the peak separated by a valley no
/// higher than 80% of the smaller one.
PeakReport detect_split(const RVec& density);

/// Gaussian half width from a log-quadratic fit where density >= 1e-3 peak.
/// Throws MultimodalProfileError when detect_split fires.
double half_width(const RVec& z, const RVec& density);

/// Fits A exp(-kappa tau) cos(f tau) + c with tau measured from the first sample.
FitResult fit_damped_cosine(const TimeSeries& s);

struct DecayFit {
    double rate;  ///< kHz
    bool non_monotonic_tail;
};

/// Decay rate from the slope of log(values) over the last half of the series.
DecayFit norm_decay_rate(const TimeSeries& s);
/// Same, from already logarithmic values.
DecayFit log_decay_rate(const RVec& times_us, const RVec& log_values);

/// Number of sign changes of v about zero counting only excursions beyond
/// hysteresis * max|v|.
int count_zero_crossings(const RVec& v, double hysteresis = 0.05);

}  // namespace imt
