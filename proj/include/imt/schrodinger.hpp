#pragma once

#include <functional>
#include <string>
#include <vector>

#include "imt/grid.hpp"
#include "imt/linalg.hpp"
#include "imt/params.hpp"
#include "imt/synthetic.hpp"

namespace imt {

// -(1/2 M_z(z)) d^2/dz^2 + U_m(z) on a cell-centred z axis, Dirichlet walls
// one cell beyond the outermost samples.
struct Hamiltonian1D {
    Tridiag h;
    RVec z;
    double dz = 0.0;
    int m = 0;
    std::vector<std::string> warnings;
};

Hamiltonian1D build_hamiltonian_1d(const ParamSet& p, const DerivedConstants& d, int m);
Hamiltonian1D build_hamiltonian_1d(const ParamSet& p, const DerivedConstants& d, int m,
                                   const RVec& z);

struct ModeSet {
    CVec eigenvalues;  ///< decreasing imaginary part
    std::vector<CVec> eigenvectors;  ///< sum |psi|^2 dz = 1
    RVec residuals;    ///< ||H psi - nu psi|| / ||psi||
    std::vector<bool> converged;
    RVec z;
    std::string method;  ///< "inverse-iteration" or "dense"
};

struct EigenOptions {
    double tol = 1e-8;
    int max_iter = 60;
    CVec seeds;  ///< initial shifts; empty means dense
    bool allow_dense_fallback = true;
};

/// The k slowest-decaying modes of H.
ModeSet eigenmodes(const Hamiltonian1D& h, int k, const EigenOptions& opt = {});

/// Shifts delta_m + (n + 1/2) omega_m for n = 0..k-1.
CVec analytic_seeds(const ParamSet& p, const DerivedConstants& d, int m, int k);

/// Crank-Nicolson propagation of psi under H for `steps` steps of dt.
CVec evolve_1d(const Hamiltonian1D& h, CVec psi, double dt, int steps);

struct TrajectoryRow {
    double t;          ///< internal time, 1/Gamma
    double z_mean;
    double y_mean;
    double norm2;      ///< integral of |rho21|^2
    double log_norm2;  ///< log of norm2, free of underflow
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    ComplexField2D final_state;  ///< shape only; multiply by exp(log_norm2 / 2) for the true scale
    double max_step_growth = 0.0;  ///< largest per-step ratio of norm2
};

// Strang-split propagator for the gauge-coupled equation: U/2, Ky/2, Kz, Ky/2, U/2.
class Eq6Propagator {
public:
    Eq6Propagator(const PotentialMap& pm, double dt);
    void step(ComplexField2D& f) const;
    double dt() const { return dt_; }

private:
    struct Line {
        Tridiag rhs;
        std::vector<TridiagLU> solves;
    };
    void sweep_y(ComplexField2D& f) const;
    void sweep_z(ComplexField2D& f) const;

    Grid2D grid_;
    double dt_;
    std::vector<Line> ylines_;  ///< one per z index, duration dt/2
    std::vector<Line> zlines_;  ///< one per y index, duration dt
    CVec half_phase_;           ///< exp(-i U dt/2)
};

/// Line operator [-d^2 + 2iA d + iA' + A^2] / 2M with antisymmetric ghosts.
Tridiag kinetic_line(const CVec& mass, const CVec& a, double h);

struct EvolveOptions {
    int sample_every = 1;
    int finite_check_every = 100;
    double blowup_factor = 10.0;
    std::function<void(const TrajectoryRow&, const ComplexField2D&)> on_sample;
};

/// Throws NumericalError on NaN and StabilityError when the norm grows past
/// blowup_factor times its initial value.
Trajectory evolve_dsp(ComplexField2D rho21, const PotentialMap& pm, double dt, int steps,
                      const EvolveOptions& opt = {});

/// exp(-M_z^c omega_0 (z - z0)^2 / 2) cos(k_y y / 2), unit norm.
ComplexField2D coherent_state(const ParamSet& p, const DerivedConstants& d, const Grid2D& g,
                              double z0);

/// psi(z) cos(k_y y / 2) with unit norm; psi sampled on the grid's z axis.
ComplexField2D separable_state(const Grid2D& g, const CVec& psi_z, double k_y);

}  // namespace imt
