#include "doctest.h"

#include "imt/analytic.hpp"
#include "imt/error.hpp"
#include "imt/synthetic.hpp"
#include "support.hpp"

using namespace imt;
using imt::test::pi;

TEST_CASE("critical phase for the splitting parameters") {
    const ParamSet p = imt::test::fig4_params(0.0);
    const DerivedConstants d = derive_constants(p);
    const double phic = critical_phase(p, d);
    CHECK(std::abs(phic - 0.12 * pi) <= 0.005 * pi);
    auto im_d0 = [&](double phi) {
        ParamSet q = p;
        q.phi = phi;
        return trap_depth(q, d, 0).imag();
    };
    const double root = imt::test::bisect(im_d0, 0.01, 0.5 * pi - 0.01, 1e-12);
    CHECK(std::abs(root - phic) < 1e-6);
    CHECK(im_d0(phic - 0.01) < 0.0);
    CHECK(im_d0(phic + 0.01) > 0.0);
}

TEST_CASE("critical phase domain errors") {
    ParamSet p = imt::test::fig4_params(0.0);
    p.alpha = 0.25;
    CHECK_THROWS_AS(critical_phase(p, derive_constants(p)), DomainError);
}

TEST_CASE("trap frequencies at the oscillation parameters") {
    for (auto [delta, khz] : {std::pair{1.0, 66.0}, std::pair{2.0, 91.6}}) {
        const ParamSet p = imt::test::fig3_params(delta);
        const Units u(p);
        const double re = u.to_khz(trap_frequency(p, derive_constants(p), 0).real());
        CHECK(re == doctest::Approx(khz).epsilon(0.01));
    }
}

TEST_CASE("mass angle and polar decomposition") {
    ParamSet p;
    DerivedConstants d = derive_constants(p);
    CentralQuantities c = central_quantities(p, d);
    CHECK(c.theta == doctest::Approx(pi / 2));
    for (double delta : {-0.7, 0.0, 0.3, 2.0}) {
        p.delta_p = delta;
        CHECK(central_quantities(p, d).theta ==
              doctest::Approx(std::acos(2 * delta / std::sqrt(4 * delta * delta + 1))).epsilon(1e-12));
    }
    p.delta_p = 0.0;
    CHECK(std::abs(c.m_y_c.real()) < 1e-15 * std::abs(c.m_y_c));
    for (double delta : {-2.0, -0.3, 0.0, 0.8, 5.0, 1e6}) {
        p.delta_p = delta;
        p.phi = 0.37;
        c = central_quantities(p, d);
        const cplx polar = c.m_y_modulus * cplx(std::cos(c.theta), std::sin(c.theta));
        CHECK(std::abs(polar - c.m_y_c) < 1e-14 * std::abs(c.m_y_c));
    }
    CHECK(c.theta < 1e-5);
    p.phi = 0.0;
    CHECK(std::abs(central_quantities(p, d).a_y_c) == 0.0);
}

TEST_CASE("Hermite recurrence") {
    for (double x : {-1.3, 0.0, 0.4, 2.1}) {
        CHECK(hermite(0, x).real() == doctest::Approx(1.0));
        CHECK(hermite(1, x).real() == doctest::Approx(2 * x));
        CHECK(hermite(3, x).real() == doctest::Approx(8 * x * x * x - 12 * x));
        CHECK(hermite(4, x).real() == doctest::Approx(16 * std::pow(x, 4) - 48 * x * x + 12));
    }
}

TEST_CASE("spectrum is evenly spaced by the trap frequency") {
    const ParamSet p = imt::test::fig3_params(1.0);
    const DerivedConstants d = derive_constants(p);
    for (int m : {0, 1}) {
        const HarmonicSolution h0 = harmonic_solution(p, d, 0, m);
        for (int n = 1; n <= 5; ++n) {
            const HarmonicSolution hn = harmonic_solution(p, d, n, m);
            CHECK(std::abs(hn.nu_nm - h0.nu_nm - double(n) * h0.omega_m) < 1e-13 * std::abs(h0.omega_m) * n);
        }
    }
}

TEST_CASE("eigenfunctions are normalized and the first excited state has a central node") {
    for (double delta : {-0.5, 0.0, 1.0}) {
        ParamSet p;
        p.delta_p = delta;
        const DerivedConstants d = derive_constants(p);
        for (int n = 0; n <= 4; ++n) {
            const HarmonicSolution h = harmonic_solution(p, d, n, 0);
            const double s = imt::test::simpson([&](double z) { return std::norm(h.psi(z)); }, -6, 6, 20000);
            CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
        }
        CHECK(std::abs(harmonic_solution(p, d, 1, 0).psi(0.0)) == 0.0);
        CHECK((p.alpha < 0 && harmonic_solution(p, d, 0, 0).kappa.real() > 0));
    }
}

TEST_CASE("analytic eigenfunction satisfies the discretized quadratic oscillator") {
    for (double delta : {0.0, 1.0}) {
        ParamSet p;
        p.delta_p = delta;
        const DerivedConstants d = derive_constants(p);
        const int n = 1024;
        const double zmax = 8.0 * ground_width(p, d), h = 2 * zmax / (n - 1);
        for (int level : {0, 1, 2}) {
            const HarmonicSolution s = harmonic_solution(p, d, level, 0);
            const cplx w = s.omega_m;
            double num = 0, den = 0;
            for (int i = 1; i < n - 1; ++i) {
                const double z = -zmax + i * h;
                const cplx lap = (s.psi(z + h) - 2.0 * s.psi(z) + s.psi(z - h)) / (h * h);
                const cplx hpsi = -lap / (2.0 * s.m_z_c) + (0.5 * s.m_z_c * w * w * z * z + s.delta_m) * s.psi(z);
                num += std::norm(hpsi - s.nu_nm * s.psi(z));
                den += std::norm(s.psi(z));
            }
            CHECK(std::sqrt(num / den) <= 1e-6);
        }
    }
}

TEST_CASE("trap vanishes as alpha approaches zero from below") {
    ParamSet p;
    const DerivedConstants d = derive_constants(p);
    double last = 1e300;
    for (double a : {-0.1, -0.01, -1e-4, -1e-6}) {
        p.alpha = a;
        const double w = std::abs(trap_frequency(p, d, 0));
        CHECK(w < last);
        last = w;
    }
    CHECK(last < 1e-2 * std::abs(trap_frequency(ParamSet{}, d, 0)));
}

TEST_CASE("ground width: monotone in detuning, alpha scaling, and consistency with the trap frequency") {
    ParamSet p;
    const DerivedConstants d = derive_constants(p);
    double last = 1e300;
    for (int k = 0; k <= 200; ++k) {
        p.delta_p = -1.0 + 0.01 * k;
        const double s = ground_width(p, d);
        CHECK(s < last);
        last = s;
        // |psi00|^2 = exp(-Re(M_z omega_0) z^2)
        const cplx k2 = central_quantities(p, d).m_z_c * trap_frequency(p, d, 0);
        CHECK(s == doctest::Approx(1.0 / std::sqrt(k2.real())).epsilon(1e-10));
    }
    p.delta_p = 0.0;
    auto alpha_for = [](double r) { return -r / (1 + r); };  // -a / (1 + a) = r
    p.alpha = alpha_for(0.2);
    const double s1 = ground_width(p, d);
    p.alpha = alpha_for(0.4);
    CHECK(s1 / ground_width(p, d) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-13));
    p.alpha = 0.25;
    CHECK_THROWS_AS(ground_width(p, d), DomainError);
    CHECK_THROWS_AS(decay_rate(p, d), DomainError);
}

TEST_CASE("decay rate: dominant detuning-independent first term, equal to twice the ground decay") {
    ParamSet p;
    const DerivedConstants d = derive_constants(p);
    double t1 = -1.0;
    for (double delta : {-0.5, 0.0, 0.5}) {
        p.delta_p = delta;
        const DecayRate r = decay_rate(p, d);
        CHECK(r.term1 / r.chi > 0.9);
        if (t1 < 0) t1 = r.term1;
        CHECK(r.term1 == doctest::Approx(t1).epsilon(1e-15));
        CHECK(r.chi == doctest::Approx(-2.0 * harmonic_solution(p, d, 0, 0).nu_nm.imag()).epsilon(1e-10));
    }
}

TEST_CASE("transverse displacement against direct quadrature") {
    const double ky = 2 * pi / 5.0, L = 5.0;
    auto quad = [&](double k1) {
        auto w = [&](double y) { return std::exp(-k1 * y) * std::pow(std::cos(0.5 * ky * y), 2); };
        const double num = imt::test::simpson([&](double y) { return y * w(y); }, -L / 2, L / 2, 4000);
        const double den = imt::test::simpson(w, -L / 2, L / 2, 4000);
        return num / den;
    };
    for (double k1 : {1e-6, 1e-3, 0.005 * ky, 0.02 * ky, 0.3, ky, 3.0 * ky}) {
        CHECK(displacement_y(k1, ky) == doctest::Approx(quad(k1)).epsilon(1e-9).scale(1e-12));
        CHECK(displacement_y(k1, ky) < 0.0);
        CHECK(displacement_y(-k1, ky) == doctest::Approx(-displacement_y(k1, ky)).epsilon(1e-13));
        CHECK(quad(-k1) == doctest::Approx(-quad(k1)).epsilon(1e-9).scale(1e-12));
    }
    CHECK(displacement_y(0.0, ky) == 0.0);
    // continuity across the series switch
    const double u = 1e-2 * ky;
    CHECK(displacement_y(u * (1 - 1e-9), ky) == doctest::Approx(displacement_y(u * (1 + 1e-9), ky)).epsilon(1e-8));
    CHECK_THROWS_AS(displacement_y(0.1, 0.0), ValidationError);
}
