#include "imt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "imt/error.hpp"

namespace imt {

namespace {

const cplx I(0.0, 1.0);

// Second-order first derivative along z (axis 0) or y (axis 1); one-sided
// three-point stencils at the edges.
ComplexField2D derivative(const ComplexField2D& f, int axis) {
    const Grid2D& g = f.grid();
    ComplexField2D out(g);
    const int n = axis == 0 ? g.nz : g.ny;
    const double h = axis == 0 ? g.dz() : g.dy();
    const int m = axis == 0 ? g.ny : g.nz;
    for (int l = 0; l < m; ++l) {
        auto at = [&](int k) -> const cplx& { return axis == 0 ? f(k, l) : f(l, k); };
        auto put = [&](int k) -> cplx& { return axis == 0 ? out(k, l) : out(l, k); };
        for (int k = 1; k < n - 1; ++k) put(k) = (at(k + 1) - at(k - 1)) / (2.0 * h);
        put(0) = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
        put(n - 1) = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    }
    return out;
}

}  // namespace

PotentialMap potential_map(const ControlFieldPair& cf, const ParamSet& p,
                           const DerivedConstants& d, double mass_floor) {
    const Grid2D& g = cf.forward.grid();
    const double eta = d.eta;
    const cplx det = 2.0 * p.delta_p - I;  // 2 Delta_p - i Gamma

    PotentialMap pm{ComplexField2D(g), ComplexField2D(g), ComplexField2D(g), ComplexField2D(g),
                    ComplexField2D(g), ComplexField2D(g), ComplexField2D(g)};
    const ComplexField2D dzF = derivative(cf.forward, 0);
    const ComplexField2D dzB = derivative(cf.backward, 0);
    const ComplexField2D dyF = derivative(cf.forward, 1);
    const ComplexField2D dyB = derivative(cf.backward, 1);

    for (std::size_t k = 0; k < g.size(); ++k) {
        const cplx F = cf.forward.data()[k];
        const cplx B = cf.backward.data()[k];
        const double vf = std::norm(F) / (2.0 * eta);
        const double vb = std::norm(B) / (2.0 * eta);
        if (!(vf + vb > mass_floor)) {
            std::ostringstream os;
            os << "V_F + V_B = " << vf + vb << " below floor " << mass_floor;
            throw SingularMassError(os.str());
        }
        const double mz = d.k_p / (vf + vb);
        const cplx my = eta / (2.0 * det * (vf + vb));
        pm.v_f.data()[k] = vf;
        pm.v_b.data()[k] = vb;
        pm.m_z.data()[k] = mz;
        pm.m_y.data()[k] = my;
        pm.a_z.data()[k] = I * mz / (2.0 * eta * d.k_p) *
                           (std::conj(F) * dzF.data()[k] + std::conj(B) * dzB.data()[k]);
        pm.a_y.data()[k] = my * (vb - vf);
    }

    const ComplexField2D dzAz = derivative(pm.a_z, 0);
    const ComplexField2D dyAy = derivative(pm.a_y, 1);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const cplx F = cf.forward.data()[k];
        const cplx B = cf.backward.data()[k];
        const cplx mz = pm.m_z.data()[k];
        const cplx my = pm.m_y.data()[k];
        const cplx az = pm.a_z.data()[k];
        const cplx ay = pm.a_y.data()[k];
        pm.u.data()[k] = I / (2.0 * eta) *
                             (std::conj(B) * dyB.data()[k] - std::conj(F) * dyF.data()[k]) -
                         az * az / (2.0 * mz) - ay * ay / (2.0 * my) +
                         dzAz.data()[k] / (2.0 * I * mz) + dyAy.data()[k] / (2.0 * I * my);
    }
    return pm;
}

LocalMasses local_masses(const ParamSet& p, const DerivedConstants& d, double z) {
    const double g = std::exp(-z * z / (p.w0 * p.w0));
    const double c2 = std::cos(p.phi) * std::cos(p.phi);
    const double s2 = std::sin(p.phi) * std::sin(p.phi);
    const double om2 = p.omega * p.omega;
    const double bz = 1.0 + 2.0 * p.alpha * c2 * g + p.alpha * p.alpha * g * g;
    LocalMasses lm{};
    lm.m_z = d.k_p * d.eta / (om2 * bz);
    lm.m_y = d.eta * lm.m_z / (2.0 * (2.0 * p.delta_p - I) * d.k_p);
    lm.a_y = -2.0 * p.alpha * lm.m_y * om2 * s2 * g / d.eta;
    return lm;
}

cplx imt_potential(const ParamSet& p, const DerivedConstants& d, int m, double z) {
    const LocalMasses lm = local_masses(p, d, z);
    const double q = (m + 0.5) * d.k_y;
    return q * q / (2.0 * lm.m_y) - lm.a_y * lm.a_y / (2.0 * lm.m_y);
}

cplx trap_depth(const ParamSet& p, const DerivedConstants& d, int m) {
    validate(p);
    if (m < 0) throw ValidationError("m must be non-negative");
    const double a = p.alpha;
    const double c2 = std::cos(p.phi) * std::cos(p.phi);
    const double s2 = std::sin(p.phi) * std::sin(p.phi);
    const double om2 = p.omega * p.omega;
    const double b = 1.0 + 2.0 * a * c2 + a * a;
    const double n2 = (1.0 + 2.0 * m) * (1.0 + 2.0 * m);
    const cplx t1 = -a * (a + 2.0 * c2) * (2.0 * p.delta_p - I) * n2 * d.k_y * d.k_y * om2 /
                    (4.0 * d.eta * d.eta);
    const cplx t2 = (2.0 * p.delta_p + I) * a * a * om2 * s2 * s2 /
                    ((4.0 * p.delta_p * p.delta_p + 1.0) * b);
    return t1 + t2;
}

ImtProfile imt_profile(const ParamSet& p, const DerivedConstants& d, int m, const RVec& z) {
    require_regime(p);
    if (m < 0) throw ValidationError("m must be non-negative");
    ImtProfile prof;
    prof.m = m;
    prof.z = z;
    prof.u_m.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) prof.u_m[i] = imt_potential(p, d, m, z[i]);
    double edge = 0.0;
    for (double v : z) edge = std::max(edge, std::abs(v));
    prof.z_far = std::max(6.0 * p.w0, edge);
    prof.depth = trap_depth(p, d, m);
    prof.depth_numeric = imt_potential(p, d, m, prof.z_far) - imt_potential(p, d, m, 0.0);
    return prof;
}

ImtProfile imt_profile(const ParamSet& p, const DerivedConstants& d, int m) {
    return imt_profile(p, d, m, cell_axis(p.grid.nz, z_half_extent(p)));
}

}  // namespace imt
