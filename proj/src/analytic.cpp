#include "imt/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "imt/error.hpp"

namespace imt {

namespace {

const cplx I(0.0, 1.0);
constexpr double pi = std::numbers::pi;

void require_trap(const ParamSet& p) {
    if (!(p.alpha < 0.0)) throw DomainError("closed form needs alpha < 0");
    if (p.phi != 0.0) throw DomainError("closed form needs phi = 0");
}

}  // namespace

CentralQuantities central_quantities(const ParamSet& p, const DerivedConstants& d, double floor) {
    validate(p);
    const double a = p.alpha;
    const double c2 = std::cos(p.phi) * std::cos(p.phi);
    const double s2 = std::sin(p.phi) * std::sin(p.phi);
    const double om2 = p.omega * p.omega;
    const double dd = 4.0 * p.delta_p * p.delta_p + 1.0;
    CentralQuantities c{};
    c.b = 1.0 + 2.0 * a * c2 + a * a;
    if (!(c.b > floor)) throw SingularMassError("1 + 2 alpha cos^2 phi + alpha^2 vanishes");
    c.m_y_c = d.eta * d.eta * (2.0 * p.delta_p + I) / (2.0 * om2 * c.b * dd);
    c.m_y_modulus = d.eta * d.eta / (2.0 * om2 * c.b * std::sqrt(dd));
    c.theta = std::atan2(1.0, 2.0 * p.delta_p);
    c.m_z_c = d.k_p * d.eta / (om2 * c.b);
    c.a_y_c = -a * d.eta * (2.0 * p.delta_p + I) * s2 / (c.b * dd);
    return c;
}

cplx hermite(int n, cplx x) {
    if (n < 0) throw ValidationError("Hermite order must be non-negative");
    cplx h0 = 1.0;
    if (n == 0) return h0;
    cplx h1 = 2.0 * x;
    for (int k = 1; k < n; ++k) {
        const cplx h2 = 2.0 * x * h1 - 2.0 * static_cast<double>(k) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

cplx trap_frequency(const ParamSet& p, const DerivedConstants& d, int m) {
    const CentralQuantities c = central_quantities(p, d);
    const double a = p.alpha;
    const double c2 = std::cos(p.phi) * std::cos(p.phi);
    const double q = (m + 0.5) * d.k_y;
    const cplx den = c.m_y_c * c.m_z_c * p.w0 * p.w0 * c.b;
    const cplx w2 = q * q * 2.0 * (-a) * (a + c2) / den +
                    2.0 * c.a_y_c * c.a_y_c * (1.0 + a * c2) / den;
    cplx w = std::sqrt(w2);
    if ((c.m_z_c * w).real() < 0.0) w = -w;
    return w;
}

HarmonicSolution harmonic_solution(const ParamSet& p, const DerivedConstants& d, int n, int m) {
    if (n < 0 || m < 0) throw ValidationError("quantum numbers must be non-negative");
    const CentralQuantities c = central_quantities(p, d);
    HarmonicSolution h;
    h.n = n;
    h.m = m;
    h.m_z_c = c.m_z_c;
    h.omega_m = trap_frequency(p, d, m);
    const double q = (m + 0.5) * d.k_y;
    h.delta_m = q * q / (2.0 * c.m_y_c) - c.a_y_c * c.a_y_c / (2.0 * c.m_y_c);
    h.nu_nm = h.delta_m + (n + 0.5) * h.omega_m;
    const cplx k2 = c.m_z_c * h.omega_m;
    if (!(k2.real() > 0.0) || !std::isfinite(k2.real()))
        throw NonNormalizableError("no branch of the trap frequency gives a decaying Gaussian");
    h.kappa = std::sqrt(k2);

    // |psi|^2 decays like exp(-Re(k2) z^2) times a polynomial; integrate well past it.
    const double zc = std::sqrt((2.0 * n + 60.0) / k2.real());
    const int npts = 4000;
    const double dz = 2.0 * zc / npts;
    double s = 0.0;
    for (int i = 0; i <= npts; ++i) {
        const double z = -zc + i * dz;
        const double w = (i == 0 || i == npts) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * std::norm(hermite(n, h.kappa * z) * std::exp(-0.5 * k2 * z * z));
    }
    s *= dz / 3.0;
    h.norm = 1.0 / std::sqrt(s);
    return h;
}

cplx HarmonicSolution::psi(double z) const {
    const cplx k2 = kappa * kappa;
    return norm * hermite(n, kappa * z) * std::exp(-0.5 * k2 * z * z);
}

CVec HarmonicSolution::sample(const RVec& z) const {
    CVec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = psi(z[i]);
    return out;
}

double ground_width(const ParamSet& p, const DerivedConstants& d) {
    validate(p);
    require_trap(p);
    const double a = p.alpha;
    const double s = 2.0 * p.delta_p + std::sqrt(1.0 + 4.0 * p.delta_p * p.delta_p);
    const double r = 2.0 * d.eta * (1.0 + a) / (-a * d.k_p * s);
    return std::sqrt(p.w0 / d.k_y) * std::pow(r, 0.25);
}

DecayRate decay_rate(const ParamSet& p, const DerivedConstants& d) {
    validate(p);
    require_trap(p);
    const double a = p.alpha;
    const double om2 = p.omega * p.omega;
    const double s = 2.0 * p.delta_p + std::sqrt(1.0 + 4.0 * p.delta_p * p.delta_p);
    DecayRate r{};
    r.term1 = d.k_y * d.k_y * om2 * (1.0 + a) * (1.0 + a) / (2.0 * d.eta * d.eta);
    r.term2 = d.k_y * om2 * std::sqrt(-a * std::pow(1.0 + a, 3)) /
              (p.w0 * std::sqrt(2.0 * d.k_p * std::pow(d.eta, 3) * s));
    r.chi = r.term1 + r.term2;
    return r;
}

double displacement_y(double k1, double k_y) {
    if (!(k_y > 0.0)) throw ValidationError("k_y must be positive");
    const double u = k1 / k_y;
    if (std::abs(u) < 1e-2) {
        // Taylor series of k_y <y> in u; the 1/k1 poles of the closed form cancel.
        const double u2 = u * u;
        const double c1 = 2.0 - pi * pi / 3.0;
        const double c3 = -2.0 + std::pow(pi, 4) / 45.0;
        const double c5 = 2.0 - 2.0 * std::pow(pi, 6) / 945.0;
        const double c7 = -2.0 + std::pow(pi, 8) / 4725.0;
        return u * (c1 + u2 * (c3 + u2 * (c5 + u2 * c7))) / k_y;
    }
    return (3.0 * k1 * k1 + k_y * k_y) / (k1 * (k1 * k1 + k_y * k_y)) -
           (pi / k_y) / std::tanh(pi * u);
}

double displacement_wavenumber(const ParamSet& p, const DerivedConstants& d) {
    return 2.0 * central_quantities(p, d).a_y_c.imag();
}

double critical_phase(const ParamSet& p, const DerivedConstants& d) {
    validate(p);
    const double a = p.alpha;
    if (!(a < 0.0)) throw DomainError("critical phase needs alpha < 0");
    const double a1 = (1.0 + a) * (1.0 + a);
    const double inner = 1.0 - 4.0 * a * (2.0 + a) * a1 * d.eta * d.eta /
                                   (d.k_y * d.k_y * (1.0 + 4.0 * p.delta_p * p.delta_p));
    if (inner < 0.0) throw NoThresholdError("negative inner radicand");
    const double den = 1.0 + a * a1 - std::sqrt(inner);
    const double ratio = -(2.0 + a) * a1 / den;
    if (!(ratio >= 0.0) || !std::isfinite(ratio)) {
        std::ostringstream os;
        os << "negative outer radicand " << ratio;
        throw NoThresholdError(os.str());
    }
    return std::atan(std::sqrt(ratio));
}

}  // namespace imt
