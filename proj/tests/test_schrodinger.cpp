#include "doctest.h"

#include "imt/analysis.hpp"
#include "imt/analytic.hpp"
#include "imt/error.hpp"
#include "imt/fields.hpp"
#include "imt/schrodinger.hpp"
#include "imt/synthetic.hpp"
#include "support.hpp"

using namespace imt;
using imt::test::pi;

namespace {

PotentialMap uniform_map(const Grid2D& g, cplx mz, cplx my, cplx u) {
    PotentialMap pm{ComplexField2D(g), ComplexField2D(g), ComplexField2D(g), ComplexField2D(g),
                    ComplexField2D(g), ComplexField2D(g), ComplexField2D(g)};
    for (std::size_t k = 0; k < g.size(); ++k) {
        pm.m_z.data()[k] = mz;
        pm.m_y.data()[k] = my;
        pm.u.data()[k] = u;
    }
    return pm;
}

ComplexField2D scaled_final(const Trajectory& tr) {
    ComplexField2D f = tr.final_state;
    f *= std::exp(0.5 * tr.rows.back().log_norm2);
    return f;
}

double field_distance(const ComplexField2D& a, const ComplexField2D& b) {
    ComplexField2D d = a;
    d -= b;
    return d.norm() / b.norm();
}

}  // namespace

TEST_CASE("zero alpha: free operator with a constant complex offset") {
    ParamSet p = imt::test::small_grid(ParamSet{}, 64, 16);
    p.alpha = 0.0;
    p.delta_p = 0.3;
    const DerivedConstants d = derive_constants(p);
    const Hamiltonian1D h = build_hamiltonian_1d(p, d, 0);
    const cplx u = imt_potential(p, d, 0, 0.0);
    const ModeSet ms = eigenmodes(h, 6);
    for (cplx nu : ms.eigenvalues) CHECK(nu.imag() == doctest::Approx(u.imag()).epsilon(1e-9));

    // plane-wave dispersion with periodic wrap-around on the interior stencil
    const int n = static_cast<int>(h.z.size());
    const double m = local_masses(p, d, 0.0).m_z;
    for (int mode : {1, 3, 7}) {
        const double k = 2 * pi * mode / (n * h.dz);
        CVec psi(n);
        for (int i = 0; i < n; ++i) psi[i] = std::exp(cplx(0, k * h.z[i]));
        for (int i = 0; i < n; ++i) {
            const cplx lo = psi[(i + n - 1) % n], hi = psi[(i + 1) % n];
            const cplx hv = h.h.lower[std::max(i, 1)] * lo + h.h.diag[i] * psi[i] + h.h.upper[std::min(i, n - 2)] * hi;
            const double kd2 = (2 - 2 * std::cos(k * h.dz)) / (h.dz * h.dz);
            CHECK(std::abs(hv / psi[i] - (kd2 / (2 * m) + u)) < 1e-12 * std::abs(u));
            CHECK(std::abs(kd2 - k * k) <= k * k * k * k * h.dz * h.dz / 12.0);
        }
    }
}

TEST_CASE("ground eigenmode matches the analytic oscillator at resonance") {
    ParamSet p;
    const DerivedConstants d = derive_constants(p);
    const Hamiltonian1D h = build_hamiltonian_1d(p, d, 0);
    EigenOptions opt;
    opt.seeds = analytic_seeds(p, d, 0, 4);
    const ModeSet ms = eigenmodes(h, 4, opt);
    REQUIRE(ms.eigenvalues.size() == 4);
    for (double r : ms.residuals) CHECK(r <= 1e-8);
    for (std::size_t k = 1; k < 4; ++k) CHECK(ms.eigenvalues[k].imag() <= ms.eigenvalues[0].imag());
    CHECK(ms.eigenvalues[0].imag() > ms.eigenvalues[1].imag());
    const HarmonicSolution h0 = harmonic_solution(p, d, 0, 0);
    CHECK(overlap(ms.eigenvectors[0], h0.sample(ms.z)) >= 0.99);
    const cplx spacing = ms.eigenvalues[1] - ms.eigenvalues[0];
    CHECK(std::abs(spacing - h0.omega_m) <= 0.1 * std::abs(h0.omega_m));
    // central node of the first excited mode
    const RVec dens = [&] {
        RVec r;
        for (cplx v : ms.eigenvectors[1]) r.push_back(std::norm(v));
        return r;
    }();
    const double peak = *std::max_element(dens.begin(), dens.end());
    const std::size_t c = dens.size() / 2;
    CHECK(0.5 * (dens[c - 1] + dens[c]) < 0.05 * peak);
    // normalization
    double s = 0;
    for (cplx v : ms.eigenvectors[0]) s += std::norm(v) * h.dz;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dense and seeded solvers agree on the slowest modes") {
    ParamSet p = imt::test::small_grid(ParamSet{}, 128, 16);
    p.delta_p = 0.5;
    const DerivedConstants d = derive_constants(p);
    const Hamiltonian1D h = build_hamiltonian_1d(p, d, 0);
    EigenOptions opt;
    opt.seeds = analytic_seeds(p, d, 0, 2);
    const ModeSet a = eigenmodes(h, 2, opt);
    const ModeSet b = eigenmodes(h, 2);
    CHECK(b.method == "dense");
    CHECK(std::abs(a.eigenvalues[0] - b.eigenvalues[0]) < 1e-10 * std::abs(a.eigenvalues[0]));
    CHECK(overlap(a.eigenvectors[0], b.eigenvectors[0]) == doctest::Approx(1.0).epsilon(1e-9));
    for (double r : b.residuals) CHECK(r <= 1e-8);
    CHECK_THROWS_AS(eigenmodes(h, 33), ValidationError);
    CHECK_THROWS_AS(eigenmodes(h, 0), ValidationError);
}

TEST_CASE("coarse grids are flagged") {
    ParamSet p = imt::test::small_grid(ParamSet{}, 16, 16);
    const Hamiltonian1D h = build_hamiltonian_1d(p, derive_constants(p), 0);
    CHECK_FALSE(h.warnings.empty());
}

TEST_CASE("evolving the ground mode only rotates its phase") {
    ParamSet p;
    p.delta_p = 0.5;
    const DerivedConstants d = derive_constants(p);
    const Hamiltonian1D h = build_hamiltonian_1d(p, d, 0);
    EigenOptions opt;
    opt.seeds = analytic_seeds(p, d, 0, 1);
    const ModeSet ms = eigenmodes(h, 1, opt);
    const double T = 200.0, dt = 0.5;
    const CVec out = evolve_1d(h, ms.eigenvectors[0], dt, static_cast<int>(T / dt));
    CVec expect = ms.eigenvectors[0];
    for (cplx& v : expect) v *= std::exp(cplx(0, -1) * ms.eigenvalues[0] * T);
    CHECK(imt::test::rel_l2(out, expect) < 1e-3);
}

TEST_CASE("free complex-mass Gaussian spreads as predicted") {
    // exp(-z^2 / 2s^2) evolves to sqrt(s^2 / a) exp(-z^2 / 2a), a = s^2 + i t / M
    const Grid2D g(1024, 16, 8.0, 2.5);
    const cplx mz(40.0, 10.0), my(3.0, 1.0), u(0.01, -0.002);
    const PotentialMap pm = uniform_map(g, mz, my, u);
    const double s = 0.6, dt = 0.05;
    const int steps = 100;
    ComplexField2D f(g);
    const double ky = pi / (2 * g.y_half);
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.ny; ++j) f(i, j) = std::exp(-g.z(i) * g.z(i) / (2 * s * s)) * std::cos(ky * g.y(j));
    const ComplexField2D f0 = f;
    const Trajectory tr = evolve_dsp(f, pm, dt, steps);
    const ComplexField2D out = scaled_final(tr);
    const double t = dt * steps;
    const cplx a = s * s + cplx(0, 1) * t / mz;
    // the cos profile is an exact eigenvector of the discrete y operator
    const double kd2 = (2 - 2 * std::cos(ky * g.dy())) / (g.dy() * g.dy());
    const cplx yfac = std::exp(cplx(0, -1) * (kd2 / (2.0 * my) + u) * t);
    ComplexField2D expect(g);
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.ny; ++j)
            expect(i, j) = std::sqrt(s * s / a) * std::exp(-g.z(i) * g.z(i) / (2.0 * a)) * std::cos(ky * g.y(j)) * yfac *
                           f0.norm() / f0.norm();
    CHECK(field_distance(out, expect) < 1e-4);
}

TEST_CASE("contractive, parity-preserving evolution at phi = 0") {
    ParamSet p = imt::test::small_grid(imt::test::fig3_params(1.0), 64, 32);
    const DerivedConstants d = derive_constants(p);
    const Grid2D g = Grid2D::from_params(p);
    const PotentialMap pm = potential_map(control_fields(p, d, g), p, d);
    ComplexField2D f = coherent_state(p, d, g, 0.0);
    double last = 0.0, worst_odd = 0.0;
    bool first = true, monotone = true;
    EvolveOptions opt;
    opt.on_sample = [&](const TrajectoryRow& r, const ComplexField2D& s) {
        if (!first && r.log_norm2 > last + 1e-14) monotone = false;
        first = false;
        last = r.log_norm2;
        double odd = 0, all = 0;
        for (int i = 0; i < g.nz; ++i)
            for (int j = 0; j < g.ny; ++j) {
                odd += std::norm(0.5 * (s(i, j) - s(g.nz - 1 - i, j)));
                all += std::norm(s(i, j));
            }
        worst_odd = std::max(worst_odd, std::sqrt(odd / all));
    };
    const Trajectory tr = evolve_dsp(f, pm, 1.0, 400, opt);
    CHECK(monotone);
    CHECK(tr.max_step_growth <= 1.0);
    CHECK(worst_odd < 1e-8);
}

TEST_CASE("splitting converges at second order in the time step") {
    ParamSet p = imt::test::small_grid(imt::test::fig3_params(1.0), 64, 32);
    const DerivedConstants d = derive_constants(p);
    const Grid2D g = Grid2D::from_params(p);
    const PotentialMap pm = potential_map(control_fields(p, d, g), p, d);
    const ComplexField2D f = coherent_state(p, d, g, 0.5);
    const double T = 160.0;
    auto run = [&](double dt) { return scaled_final(evolve_dsp(f, pm, dt, static_cast<int>(std::lround(T / dt)))); };
    const ComplexField2D a = run(8.0), b = run(4.0), c = run(2.0), r1 = run(2.0), r2 = run(1.0), r3 = run(0.5);
    const double e1 = field_distance(a, r1), e2 = field_distance(b, r2), e3 = field_distance(c, r3);
    MESSAGE("splitting errors " << e1 << " " << e2 << " " << e3);
    // observed order is at least two; the third-order transverse substep often dominates
    CHECK(std::log2(e1 / e2) >= 1.9);
    CHECK(std::log2(e2 / e3) >= 1.9);
    CHECK(e3 < 1e-4);
}

TEST_CASE("coherent state placement and grid limits") {
    ParamSet p = imt::test::small_grid(imt::test::fig3_params(1.0), 128, 16);
    const DerivedConstants d = derive_constants(p);
    const Grid2D g = Grid2D::from_params(p);
    const ComplexField2D f = coherent_state(p, d, g, 0.5);
    CHECK(f.norm2() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(expectation_z(f) - 0.5) < g.dz());
    CHECK_THROWS_AS(coherent_state(p, d, g, 5.9), DomainError);
}

TEST_CASE("instability and non-finite values are detected") {
    const Grid2D g(32, 16, 4.0, 2.5);
    ComplexField2D f(g);
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.ny; ++j) f(i, j) = std::exp(-g.z(i) * g.z(i)) * std::cos(0.6 * g.y(j));
    const PotentialMap gain = uniform_map(g, 10.0, cplx(1.0, 0.5), cplx(0.0, 0.5));
    CHECK_THROWS_AS(evolve_dsp(f, gain, 1.0, 100), StabilityError);
    ComplexField2D bad = f;
    bad(3, 3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(evolve_dsp(bad, uniform_map(g, 10.0, cplx(1.0, 0.5), 0.0), 1.0, 10), ZeroNormError);
    CHECK_THROWS_AS(evolve_dsp(ComplexField2D(g), gain, 1.0, 10), ZeroNormError);
}
