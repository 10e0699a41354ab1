#pragma once

#include "imt/grid.hpp"
#include "imt/params.hpp"

namespace imt {

struct CentralQuantities {
    cplx m_y_c;
    double m_y_modulus;
    double theta;  ///< mass angle, arg of m_y_c
    double m_z_c;
    cplx a_y_c;
    double b;      ///< 1 + 2 alpha cos^2 phi + alpha^2
};

inline constexpr double kDefaultDenominatorFloor = 1e-12;

CentralQuantities central_quantities(const ParamSet& p, const DerivedConstants& d,
                                     double floor = kDefaultDenominatorFloor);

/// Physicists' Hermite polynomial by upward recurrence.
cplx hermite(int n, cplx x);

// Complex-frequency oscillator level (n, m).
struct HarmonicSolution {
    int n = 0;
    int m = 0;
    cplx omega_m;
    cplx delta_m;
    cplx nu_nm;
    cplx kappa;   ///< sqrt(M_z^c omega_m), Re > 0
    double m_z_c = 0.0;
    double norm = 1.0;  ///< c_nm

    /// Normalized so that the integral of |psi|^2 over z is one.
    cplx psi(double z) const;
    CVec sample(const RVec& z) const;
};

cplx trap_frequency(const ParamSet& p, const DerivedConstants& d, int m);
HarmonicSolution harmonic_solution(const ParamSet& p, const DerivedConstants& d, int n, int m);

/// 1/e half width of |psi_00|^2, mm. Requires alpha < 0 and phi = 0.
double ground_width(const ParamSet& p, const DerivedConstants& d);

struct DecayRate {
    double chi;
    double term1;
    double term2;
};

/// Density decay rate of the ground state, Gamma. Requires alpha < 0 and phi = 0.
DecayRate decay_rate(const ParamSet& p, const DerivedConstants& d);

/// Mean y of exp(-k1 y) cos^2(k_y y / 2) on [-L/2, L/2] with L = 2 pi / k_y.
double displacement_y(double k1, double k_y);

/// 2 Im A_y^c.
double displacement_wavenumber(const ParamSet& p, const DerivedConstants& d);

/// Phase at which Im D_0 changes sign. Throws NoThresholdError when the
/// radicands do not admit a real threshold.
double critical_phase(const ParamSet& p, const DerivedConstants& d);

}  // namespace imt
