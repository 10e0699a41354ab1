#pragma once

#include <array>
#include <functional>
#include <optional>

#include "imt/fields.hpp"
#include "imt/grid.hpp"
#include "imt/linalg.hpp"
#include "imt/params.hpp"
#include "imt/schrodinger.hpp"

namespace imt {

struct AtomicFields {
    ComplexField2D rho21;
    ComplexField2D rho31_f;
    ComplexField2D rho31_b;
    ComplexField2D omega_p_f;
    ComplexField2D omega_p_b;

    explicit AtomicFields(const Grid2D& g = Grid2D())
        : rho21(g), rho31_f(g), rho31_b(g), omega_p_f(g), omega_p_b(g) {}
    AtomicFields& operator*=(cplx s);
    bool all_finite() const;
};

// The five coupled fields plus the previous level used by the two-step
// integrator. The physical state is exp(log_scale) times the stored fields.
struct AtomicState : AtomicFields {
    double t = 0.0;
    double log_scale = 0.0;
    std::optional<AtomicFields> previous;

    explicit AtomicState(const Grid2D& g = Grid2D()) : AtomicFields(g) {}
};

struct ObeOptions {
    int sponge_cells = 8;
    double sponge_strength = -1.0;  ///< peak absorption per mm; negative selects eta
    double max_dt = 4.0;            ///< accuracy bound on the step, 1/Gamma
    int finite_check_every = 100;
};

// Implicit integrator: BDF2 for the local atomic system coupled to a box-scheme
// march of the steady probe equations, diffraction extrapolated from the two
// previous levels. The first step from a state without history is backward Euler.
class ObeIntegrator {
public:
    ObeIntegrator(const ControlFieldPair& cf, const ParamSet& p, const DerivedConstants& d,
                  double dt, const ObeOptions& opt = {});

    void advance(AtomicState& s) const;
    double dt() const { return dt_; }
    const Grid2D& grid() const { return grid_; }

private:
    struct Scheme {
        double beta;
        std::vector<std::array<cplx, 9>> k;  ///< (I - beta A)^-1 per cell, row major
        std::vector<BandLU> columns;
    };
    Scheme build(double beta) const;
    void solve(const Scheme& sc, const std::vector<std::array<cplx, 3>>& r, const ComplexField2D& df,
               const ComplexField2D& db, AtomicFields& out) const;
    ComplexField2D diffraction(const ComplexField2D& omega) const;

    Grid2D grid_;
    ControlFieldPair cf_;
    double dt_;
    double delta_;
    double eta_;
    double k_p_;
    RVec sponge_;
    ObeOptions opt_;
    Scheme be_, bdf2_;
};

/// One step; constructs an integrator, so prefer ObeIntegrator for loops.
AtomicState step(const AtomicState& s, const ControlFieldPair& cf, const ParamSet& p,
                 const DerivedConstants& d, double dt);

/// Coherence psi(z) cos(k_y y / 2) with the remaining fields zero.
AtomicState stored_state(const Grid2D& g, const ComplexField2D& rho21);

/// Displaced ground-state Gaussian; throws DomainError if it leaves the grid.
AtomicState prepare_coherent_state(double z0, const ParamSet& p, const DerivedConstants& d);

/// Broad Gaussian of width 2 w0 in z, cos(k_y y / 2) in y.
AtomicState default_initial_state(const ParamSet& p, const DerivedConstants& d);

struct ObeRunOptions {
    int sample_every = 1;
    std::function<void(const TrajectoryRow&, const AtomicState&)> on_sample;
};

/// Advances s in place and samples <z>, <y> and the rho21 norm.
Trajectory run_obe(AtomicState& s, const ObeIntegrator& integ, int steps,
                   const ObeRunOptions& opt = {});

struct RelaxOptions {
    double check_interval = 20.0;  ///< 1/Gamma between shape comparisons
    int max_steps = 20000;
    ObeOptions obe;
};

struct RelaxResult {
    ComplexField2D profile;  ///< unit norm
    bool converged = false;
    double t_end = 0.0;
    double last_change = 0.0;  ///< shape change per unit time at the last check
    int steps = 0;
};

/// Relaxes until the phase-aligned normalized shape changes by less than tol
/// per unit time. relax_to_steady_profile throws NonConvergenceError where
/// relax_obe reports converged = false.
RelaxResult relax_obe(const ParamSet& p, const DerivedConstants& d, const AtomicState& initial,
                      double tol, const RelaxOptions& opt = {});
ComplexField2D relax_to_steady_profile(const ParamSet& p, const DerivedConstants& d,
                                       const AtomicState& initial, double tol,
                                       const RelaxOptions& opt = {});

/// Phase-aligned L2 distance between unit-normalized a and b.
double shape_distance(const ComplexField2D& a, const ComplexField2D& b);

}  // namespace imt
