#include "imt/fields.hpp"

#include <cmath>

namespace imt {

Envelope gaussian_envelope(double z, double y, double w0, double rayleigh) {
    const double q = 1.0 + (y / rayleigh) * (y / rayleigh);
    const double s = z * z / (w0 * w0 * q);
    return {std::exp(-s) / std::sqrt(q), s * y / rayleigh};
}

cplx control_forward(const ParamSet& p, const DerivedConstants& d, double z, double y) {
    const Envelope e = gaussian_envelope(z, y, p.w0, d.rayleigh);
    return p.omega * (1.0 + p.alpha * e.g * std::polar(1.0, -e.phase));
}

cplx control_backward(const ParamSet& p, const DerivedConstants& d, double z, double y) {
    const Envelope e = gaussian_envelope(z, y, p.w0, d.rayleigh);
    return p.omega * (1.0 + p.alpha * e.g * std::polar(1.0, e.phase + 2.0 * p.phi));
}

ControlFieldPair control_fields(const ParamSet& p, const DerivedConstants& d, const Grid2D& g) {
    ControlFieldPair cf{ComplexField2D(g), ComplexField2D(g)};
    for (int i = 0; i < g.nz; ++i) {
        const double z = g.z(i);
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.y(j);
            cf.forward(i, j) = control_forward(p, d, z, y);
            cf.backward(i, j) = control_backward(p, d, z, y);
        }
    }
    return cf;
}

ControlFieldPair control_fields(const ParamSet& p, const DerivedConstants& d) {
    return control_fields(p, d, Grid2D::from_params(p));
}

}  // namespace imt
