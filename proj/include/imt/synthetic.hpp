#pragma once

#include "imt/fields.hpp"
#include "imt/grid.hpp"
#include "imt/params.hpp"

namespace imt {

// Masses, gauge potentials and scalar potential on the 2D grid.
struct PotentialMap {
    ComplexField2D m_z;
    ComplexField2D m_y;
    ComplexField2D a_z;
    ComplexField2D a_y;
    ComplexField2D u;
    ComplexField2D v_f;
    ComplexField2D v_b;
};

inline constexpr double kDefaultMassFloor = 1e-12;

/// Throws SingularMassError if V_F + V_B drops below mass_floor anywhere.
PotentialMap potential_map(const ControlFieldPair& cf, const ParamSet& p,
                           const DerivedConstants& d, double mass_floor = kDefaultMassFloor);

// y-uniform closed forms at a single z.
struct LocalMasses {
    double m_z;
    cplx m_y;
    cplx a_y;
};

LocalMasses local_masses(const ParamSet& p, const DerivedConstants& d, double z);

/// U_m(z) from the y-uniform reduction.
cplx imt_potential(const ParamSet& p, const DerivedConstants& d, int m, double z);

struct ImtProfile {
    RVec z;
    CVec u_m;
    int m = 0;
    cplx depth;          ///< closed form
    cplx depth_numeric;  ///< U_m(z_far) - U_m(0)
    double z_far = 0.0;
};

/// Samples U_m on the cell-centred z axis of the ParamSet grid. Throws
/// RegimeError outside the y-uniform regime.
ImtProfile imt_profile(const ParamSet& p, const DerivedConstants& d, int m);
ImtProfile imt_profile(const ParamSet& p, const DerivedConstants& d, int m, const RVec& z);

cplx trap_depth(const ParamSet& p, const DerivedConstants& d, int m);

}  // namespace imt
