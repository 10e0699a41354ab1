#include "doctest.h"

#include "imt/analytic.hpp"
#include "imt/error.hpp"
#include "imt/fields.hpp"
#include "imt/synthetic.hpp"
#include "support.hpp"

using namespace imt;
using imt::test::pi;

namespace {

PotentialMap map_for(const ParamSet& p) {
    const DerivedConstants d = derive_constants(p);
    return potential_map(control_fields(p, d), p, d);
}

}  // namespace

TEST_CASE("zero alpha: flat potentials, zero gauge fields, zero depth") {
    ParamSet p = imt::test::small_grid(ParamSet{}, 48, 24);
    p.alpha = 0.0;
    p.delta_p = 0.7;
    const PotentialMap pm = map_for(p);
    const cplx u0 = pm.u.data()[0];
    for (std::size_t k = 0; k < pm.u.data().size(); ++k) {
        CHECK(std::abs(pm.a_z.data()[k]) < 1e-14);
        CHECK(std::abs(pm.a_y.data()[k]) < 1e-14);
        CHECK(std::abs(pm.u.data()[k] - u0) < 1e-12 * std::abs(u0) + 1e-14);
    }
    const DerivedConstants d = derive_constants(p);
    const ImtProfile prof = imt_profile(p, d, 0);
    for (cplx v : prof.u_m) CHECK(std::abs(v - prof.u_m[0]) < 1e-14 * std::abs(prof.u_m[0]));
    CHECK(std::abs(prof.depth) == 0.0);
    CHECK(std::abs(trap_depth(p, d, 3)) == 0.0);
}

TEST_CASE("phi = 0 gives a vanishing transverse gauge field") {
    ParamSet p = imt::test::small_grid(ParamSet{}, 64, 33);
    p.delta_p = 1.0;
    const PotentialMap pm = map_for(p);
    double amax = 0.0, mmax = 0.0;
    for (std::size_t k = 0; k < pm.a_y.data().size(); ++k) {
        amax = std::max(amax, std::abs(pm.a_y.data()[k]));
        mmax = std::max(mmax, std::abs(pm.m_y.data()[k]));
    }
    // Only the Gouy-like phase along y separates forward and backward intensities; it is
    // second order in y / L_r.
    CHECK(amax < 1e-9 * mmax);
}

TEST_CASE("central transverse mass at resonance is purely imaginary") {
    ParamSet p = imt::test::small_grid(ParamSet{}, 64, 33);
    const DerivedConstants d = derive_constants(p);
    const PotentialMap pm = map_for(p);
    const Grid2D& g = pm.m_y.grid();
    const int jc = g.ny / 2;
    REQUIRE(std::abs(g.y(jc)) < 1e-12);
    const cplx expected = cplx(0, 1) * d.eta * d.eta / (2.0 * p.omega * p.omega * (1 + p.alpha) * (1 + p.alpha));
    for (int i = 0; i < g.nz; ++i) {
        const double gz = std::exp(-g.z(i) * g.z(i) / (p.w0 * p.w0));
        const cplx at_z = cplx(0, 1) * d.eta * d.eta /
                          (2.0 * p.omega * p.omega * (1 + p.alpha * gz) * (1 + p.alpha * gz));
        CHECK(std::abs(pm.m_y(i, jc) - at_z) < 1e-12 * std::abs(at_z));
    }
    const LocalMasses lm = local_masses(p, d, 0.0);
    CHECK(std::abs(lm.m_y - expected) < 1e-13 * std::abs(expected));
    for (cplx v : pm.m_y.data()) CHECK(std::abs(v.real()) < 1e-14 * std::abs(v));
    for (cplx v : pm.m_z.data()) CHECK(v.real() > 0.0);
}

TEST_CASE("central masses agree with the two-dimensional map") {
    ParamSet p = imt::test::small_grid(ParamSet{}, 64, 33);
    p.delta_p = 0.4;
    const DerivedConstants d = derive_constants(p);
    const CentralQuantities cq = central_quantities(p, d);
    const LocalMasses lm = local_masses(p, d, 0.0);
    CHECK(cq.m_z_c == doctest::Approx(lm.m_z).epsilon(1e-13));
    CHECK(std::abs(cq.m_y_c - lm.m_y) < 1e-13 * std::abs(lm.m_y));
    const cplx Fc = control_forward(p, d, 0, 0), Bc = control_backward(p, d, 0, 0);
    const double vsum = (std::norm(Fc) + std::norm(Bc)) / (2.0 * d.eta);
    CHECK(cq.m_z_c == doctest::Approx(d.k_p / vsum).epsilon(1e-13));
}

TEST_CASE("gauge block: the y = 0 line matches the one-dimensional closed forms") {
    ParamSet p = imt::test::small_grid(ParamSet{}, 512, 65);
    p.delta_p = 1.0;
    const DerivedConstants d = derive_constants(p);
    const PotentialMap pm = map_for(p);
    const Grid2D& g = pm.m_z.grid();
    const int jc = g.ny / 2;
    double emz = 0, emy = 0, eay = 0;
    for (int i = 0; i < g.nz; ++i) {
        const LocalMasses lm = local_masses(p, d, g.z(i));
        emz = std::max(emz, std::abs(pm.m_z(i, jc) - lm.m_z) / lm.m_z);
        emy = std::max(emy, std::abs(pm.m_y(i, jc) - lm.m_y) / std::abs(lm.m_y));
        eay = std::max(eay, std::abs(pm.a_y(i, jc) - lm.a_y) / std::abs(lm.m_y));
    }
    CHECK(emz < 1e-6);
    CHECK(emy < 1e-6);
    CHECK(eay < 1e-6);
}

TEST_CASE("finite-difference gauge field converges at second order") {
    auto max_error = [](int nz) {
        ParamSet p = imt::test::small_grid(ParamSet{}, nz, 9);
        p.phi = 0.4;
        p.w0 = 1.0;
        p.medium_length = 5.0;
        p.lambda_c = 780e-6 * 1e3;  // short Rayleigh range so the phase matters
        const DerivedConstants d = derive_constants(p);
        const PotentialMap pm = potential_map(control_fields(p, d), p, d);
        const Grid2D& g = pm.a_z.grid();
        double err = 0.0;
        const int j = 1;
        for (int i = 1; i < nz - 1; ++i) {
            const double z = g.z(i), y = g.y(j), h = 1e-5;
            const cplx F = control_forward(p, d, z, y), B = control_backward(p, d, z, y);
            const cplx dF = (control_forward(p, d, z + h, y) - control_forward(p, d, z - h, y)) / (2 * h);
            const cplx dB = (control_backward(p, d, z + h, y) - control_backward(p, d, z - h, y)) / (2 * h);
            const double mz = pm.m_z(i, j).real();
            const cplx exact = cplx(0, 1) * mz / (2.0 * d.eta * d.k_p) * (std::conj(F) * dF + std::conj(B) * dB);
            err = std::max(err, std::abs(pm.a_z(i, j) - exact));
        }
        return err;
    };
    const double e1 = max_error(64), e2 = max_error(128), e3 = max_error(256);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("trap profile for positive detuning is a convex well") {
    ParamSet p;
    p.delta_p = 1.0;
    const DerivedConstants d = derive_constants(p);
    const ImtProfile prof = imt_profile(p, d, 0);
    const cplx far = imt_potential(p, d, 0, 10.0);
    CHECK(imt_potential(p, d, 0, 0.0).real() < far.real());
    CHECK(prof.depth.real() > 0.0);
    CHECK(prof.depth.imag() < 0.0);
    // Re U0 is non-decreasing in |z|
    for (std::size_t i = prof.z.size() / 2; i + 1 < prof.z.size(); ++i)
        CHECK(prof.u_m[i + 1].real() >= prof.u_m[i].real());
    for (std::size_t i = 0; i + 1 < prof.z.size() / 2; ++i)
        CHECK(prof.u_m[i].real() >= prof.u_m[i + 1].real());
}

TEST_CASE("monotone well over random attractive parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(-0.9, -0.05), ud(0.05, 3.0), uw(0.5, 2.0);
    for (int k = 0; k < 50; ++k) {
        ParamSet p;
        p.alpha = ua(rng);
        p.delta_p = ud(rng);
        p.w0 = uw(rng);
        const DerivedConstants d = derive_constants(p);
        double last = imt_potential(p, d, 0, 0.0).real();
        for (int i = 1; i <= 200; ++i) {
            const double v = imt_potential(p, d, 0, 0.03 * i * p.w0).real();
            CHECK(v >= last - 1e-15 * std::abs(last));
            last = v;
        }
    }
}

TEST_CASE("closed-form depth matches the numerical potential difference") {
    for (double phi : {0.0, 0.1 * pi, 0.3 * pi})
        for (double delta : {-1.0, 0.0, 1.0, 2.0})
            for (int m : {0, 1, 2}) {
                ParamSet p = imt::test::fig4_params(phi);
                p.delta_p = delta;
                const DerivedConstants d = derive_constants(p);
                const ImtProfile prof = imt_profile(p, d, m);
                CHECK(prof.z_far >= 6.0 * p.w0);
                CHECK(std::abs(prof.depth - prof.depth_numeric) <= 1e-10 * std::abs(prof.depth) + 1e-300);
            }
}

TEST_CASE("depth scales with (1 + 2m)^2 at phi = 0") {
    ParamSet p;
    p.delta_p = 1.0;
    const DerivedConstants d = derive_constants(p);
    const cplx d0 = trap_depth(p, d, 0), d1 = trap_depth(p, d, 1), d2 = trap_depth(p, d, 2);
    CHECK(std::abs(d1 / d0 - 9.0) < 1e-12);
    CHECK(std::abs(d2 / d0 - 25.0) < 1e-12);
    p.alpha = -0.25;
    CHECK(trap_depth(p, d, 0).imag() < 0.0);
}

TEST_CASE("singular masses and regime violations are reported") {
    ParamSet p = imt::test::small_grid(ParamSet{}, 16, 8);
    const DerivedConstants d = derive_constants(p);
    CHECK_THROWS_AS(potential_map(control_fields(p, d), p, d, 1e6), SingularMassError);
    p.w0 = 0.05;
    p.grid.z_half_extent = 0.2;
    CHECK_THROWS_AS(imt_profile(p, derive_constants(p), 0), RegimeError);
}
