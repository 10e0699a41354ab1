#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "imt/grid.hpp"
#include "imt/params.hpp"

namespace imt::test {

inline constexpr double pi = 3.14159265358979323846;

inline ParamSet fig3_params(double delta) {
    ParamSet p;
    p.w0 = 1.5;
    p.xi = 80.0;
    p.delta_p = delta;
    return p;
}

inline ParamSet fig4_params(double phi) {
    ParamSet p;
    p.w0 = 1.5;
    p.xi = 200.0;
    p.delta_p = 1.0;
    p.phi = phi;
    return p;
}

inline ParamSet small_grid(ParamSet p, int nz, int ny) {
    p.grid.nz = nz;
    p.grid.ny = ny;
    return p;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

/// Plain bisection on a sign change of f over [a, b].
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a);
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

inline double rel_l2(const CVec& a, const CVec& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace imt::test
