#pragma once

#include "imt/grid.hpp"
#include "imt/params.hpp"

namespace imt {

struct Envelope {
    double g;    ///< field amplitude G
    double phase;  ///< Phi
};

Envelope gaussian_envelope(double z, double y, double w0, double rayleigh);

/// Forward and backward control Rabi frequencies in units of Gamma.
struct ControlFieldPair {
    ComplexField2D forward;
    ComplexField2D backward;
};

cplx control_forward(const ParamSet& p, const DerivedConstants& d, double z, double y);
cplx control_backward(const ParamSet& p, const DerivedConstants& d, double z, double y);

ControlFieldPair control_fields(const ParamSet& p, const DerivedConstants& d);
ControlFieldPair control_fields(const ParamSet& p, const DerivedConstants& d, const Grid2D& g);

}  // namespace imt
