#include "imt/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "imt/analysis.hpp"
#include "imt/analytic.hpp"
#include "imt/error.hpp"

namespace imt {

namespace {

const cplx I(0.0, 1.0);

double vnorm(const CVec& v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

void scale(CVec& v, cplx s) {
    for (cplx& x : v) x *= s;
}

cplx rayleigh(const Tridiag& h, const CVec& v) {
    const CVec hv = h.apply(v);
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        num += std::conj(v[i]) * hv[i];
        den += std::norm(v[i]);
    }
    return num / den;
}

double residual(const Tridiag& h, const CVec& v, cplx nu) {
    const CVec hv = h.apply(v);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::norm(hv[i] - nu * v[i]);
    return std::sqrt(s) / vnorm(v);
}

Tridiag shifted(const Tridiag& h, cplx sigma) {
    Tridiag t = h;
    for (cplx& x : t.diag) x -= sigma;
    return t;
}

struct Refined {
    cplx nu;
    CVec v;
    double res;
};

// Shifted inverse iteration, re-shifting to the Rayleigh quotient whenever
// progress stalls.
Refined inverse_iteration(const Tridiag& h, cplx sigma, CVec v, double tol, int max_iter) {
    const double scale_h = std::max(1e-300, std::abs(sigma));
    scale(v, 1.0 / vnorm(v));
    Refined best{sigma, v, std::numeric_limits<double>::infinity()};
    TridiagLU lu(shifted(h, sigma * (1.0 + 1e-13) + 1e-15 * scale_h));
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        lu.solve(v);
        const double nv = vnorm(v);
        if (!(nv > 0.0) || !std::isfinite(nv)) break;
        scale(v, 1.0 / nv);
        const cplx nu = rayleigh(h, v);
        const double r = residual(h, v, nu);
        if (r < best.res) best = {nu, v, r};
        if (r <= tol * 1e-2) break;
        if (it >= 2 && r > 0.5 * last) {
            lu = TridiagLU(shifted(h, nu * (1.0 + 1e-13) + 1e-15 * scale_h));
        }
        last = r;
    }
    return best;
}

void normalize_mode(CVec& v, double dz) {
    std::size_t imax = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    const cplx ph = std::abs(v[imax]) > 0 ? std::conj(v[imax]) / std::abs(v[imax]) : 1.0;
    scale(v, ph / (vnorm(v) * std::sqrt(dz)));
}

ModeSet dense_modes(const Hamiltonian1D& H, int k, const EigenOptions& opt) {
    const int n = static_cast<int>(H.h.size());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = H.h.diag[i];
        if (i > 0) a(i, i - 1) = H.h.lower[i];
        if (i + 1 < n) a(i, i + 1) = H.h.upper[i];
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, true);
    if (es.info() != Eigen::Success) throw NonConvergenceError("dense eigensolver failed");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return es.eigenvalues()(x).imag() > es.eigenvalues()(y).imag();
    });
    ModeSet ms;
    ms.method = "dense";
    ms.z = H.z;
    for (int q = 0; q < k; ++q) {
        const int c = order[q];
        CVec v(n);
        for (int i = 0; i < n; ++i) v[i] = es.eigenvectors()(i, c);
        Refined r = inverse_iteration(H.h, es.eigenvalues()(c), v, opt.tol, 4);
        ms.eigenvalues.push_back(r.nu);
        ms.eigenvectors.push_back(std::move(r.v));
        ms.residuals.push_back(r.res);
        ms.converged.push_back(r.res <= opt.tol);
    }
    for (CVec& v : ms.eigenvectors) normalize_mode(v, H.dz);
    return ms;
}

}  // namespace

Hamiltonian1D build_hamiltonian_1d(const ParamSet& p, const DerivedConstants& d, int m,
                                   const RVec& z) {
    require_regime(p);
    if (m < 0) throw ValidationError("m must be non-negative");
    if (z.size() < 8) throw ValidationError("z axis needs at least 8 points");
    Hamiltonian1D H;
    H.m = m;
    H.z = z;
    H.dz = z[1] - z[0];
    const std::size_t n = z.size();
    H.h = Tridiag(n);
    const double h2 = H.dz * H.dz;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = 1.0 / (2.0 * local_masses(p, d, z[i]).m_z * h2);
        H.h.lower[i] = -c;
        H.h.upper[i] = -c;
        H.h.diag[i] = 2.0 * c + imt_potential(p, d, m, z[i]);
    }
    H.h.lower[0] = 0.0;
    H.h.upper[n - 1] = 0.0;
    try {
        const HarmonicSolution hs = harmonic_solution(p, d, 0, m);
        const double sigma = 1.0 / std::sqrt((hs.kappa * hs.kappa).real());
        if (2.0 * sigma / H.dz < 10.0) {
            std::ostringstream os;
            os << "grid too coarse: ground mode spans " << 2.0 * sigma / H.dz << " cells";
            H.warnings.push_back(os.str());
        }
    } catch (const Error&) {
    }
    return H;
}

Hamiltonian1D build_hamiltonian_1d(const ParamSet& p, const DerivedConstants& d, int m) {
    return build_hamiltonian_1d(p, d, m, cell_axis(p.grid.nz, z_half_extent(p)));
}

CVec analytic_seeds(const ParamSet& p, const DerivedConstants& d, int m, int k) {
    CVec s;
    for (int n = 0; n < k; ++n) s.push_back(harmonic_solution(p, d, n, m).nu_nm);
    return s;
}

ModeSet eigenmodes(const Hamiltonian1D& H, int k, const EigenOptions& opt) {
    const int n = static_cast<int>(H.h.size());
    if (k < 1 || k > std::max(1, n / 4)) throw ValidationError("mode count must lie in [1, nz/4]");
    const bool dense_ok = opt.allow_dense_fallback && n <= 2048;
    if (opt.seeds.empty()) {
        if (!dense_ok) throw ValidationError("no seeds and grid too large for a dense solve");
        return dense_modes(H, k, opt);
    }

    ModeSet ms;
    ms.method = "inverse-iteration";
    ms.z = H.z;
    std::vector<Refined> found;
    for (std::size_t s = 0; s < opt.seeds.size(); ++s) {
        CVec v(n);
        for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.37 * std::sin(1.3 * i + s) + 0.11 * I * std::cos(0.7 * i);
        found.push_back(inverse_iteration(H.h, opt.seeds[s], std::move(v), opt.tol, opt.max_iter));
    }
    std::sort(found.begin(), found.end(),
              [](const Refined& a, const Refined& b) { return a.nu.imag() > b.nu.imag(); });
    bool ok = static_cast<int>(found.size()) >= k;
    for (std::size_t a = 0; a < found.size(); ++a) {
        if (!(found[a].res <= opt.tol)) ok = false;
        for (std::size_t b = a + 1; b < found.size(); ++b)
            if (std::abs(found[a].nu - found[b].nu) <= 1e-9 * std::max(1e-300, std::abs(found[a].nu)))
                ok = false;
    }
    if (!ok && dense_ok) return dense_modes(H, k, opt);
    for (int q = 0; q < std::min<int>(k, found.size()); ++q) {
        ms.eigenvalues.push_back(found[q].nu);
        ms.eigenvectors.push_back(found[q].v);
        ms.residuals.push_back(found[q].res);
        ms.converged.push_back(found[q].res <= opt.tol);
    }
    for (CVec& v : ms.eigenvectors) normalize_mode(v, H.dz);
    return ms;
}

CVec evolve_1d(const Hamiltonian1D& H, CVec psi, double dt, int steps) {
    const std::size_t n = H.h.size();
    Tridiag lhs(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        lhs.lower[i] = 0.5 * I * dt * H.h.lower[i];
        lhs.upper[i] = 0.5 * I * dt * H.h.upper[i];
        lhs.diag[i] = 1.0 + 0.5 * I * dt * H.h.diag[i];
        rhs.lower[i] = -lhs.lower[i];
        rhs.upper[i] = -lhs.upper[i];
        rhs.diag[i] = 1.0 - 0.5 * I * dt * H.h.diag[i];
    }
    const TridiagLU lu(lhs);
    CVec tmp(n);
    for (int s = 0; s < steps; ++s) {
        rhs.apply(psi.data(), tmp.data());
        lu.solve(tmp);
        psi.swap(tmp);
    }
    return psi;
}

Tridiag kinetic_line(const CVec& mass, const CVec& a, double h) {
    const std::size_t n = mass.size();
    CVec ap(n);
    for (std::size_t k = 1; k + 1 < n; ++k) ap[k] = (a[k + 1] - a[k - 1]) / (2.0 * h);
    ap[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h);
    ap[n - 1] = (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * h);
    Tridiag t(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx inv2m = 1.0 / (2.0 * mass[k]);
        const cplx lo = (-1.0 / (h * h) - I * a[k] / h) * inv2m;
        const cplx up = (-1.0 / (h * h) + I * a[k] / h) * inv2m;
        t.diag[k] = (2.0 / (h * h) + I * ap[k] + a[k] * a[k]) * inv2m;
        t.lower[k] = lo;
        t.upper[k] = up;
        if (k == 0) {
            t.diag[k] -= lo;
            t.lower[k] = 0.0;
        }
        if (k == n - 1) {
            t.diag[k] -= up;
            t.upper[k] = 0.0;
        }
    }
    return t;
}

Eq6Propagator::Eq6Propagator(const PotentialMap& pm, double dt) : grid_(pm.u.grid()), dt_(dt) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    const Grid2D& g = grid_;
    if (g.nz < 3 || g.ny < 3) throw ValidationError("grid too small for the propagator");
    // R(x) = num(x) / prod(1 - x / r) applied to x = -i dur K.
    auto make_line = [](const Tridiag& k, double dur, cplx num, const CVec& roots) {
        const std::size_t n = k.size();
        auto shifted_op = [&](cplx c) {
            Tridiag t(n);
            for (std::size_t i = 0; i < n; ++i) {
                t.lower[i] = c * k.lower[i];
                t.upper[i] = c * k.upper[i];
                t.diag[i] = 1.0 + c * k.diag[i];
            }
            return t;
        };
        Line l{shifted_op(-I * dur * num), {}};
        for (cplx r : roots) {
            l.solves.emplace_back(shifted_op(I * dur / r));
            if (l.solves.back().singular()) throw NumericalError("singular line operator");
        }
        return l;
    };
    // Crank-Nicolson along z; L-stable (1,2) Pade along y, where the complex
    // mass makes short wavelengths strongly damped.
    const CVec cn_roots{2.0};
    const CVec pade_roots{cplx(2.0, std::sqrt(2.0)), cplx(2.0, -std::sqrt(2.0))};
    for (int i = 0; i < g.nz; ++i)
        ylines_.push_back(make_line(kinetic_line(pm.m_y.column_y(i), pm.a_y.column_y(i), g.dy()),
                                    0.5 * dt, 1.0 / 3.0, pade_roots));
    for (int j = 0; j < g.ny; ++j)
        zlines_.push_back(
            make_line(kinetic_line(pm.m_z.row_z(j), pm.a_z.row_z(j), g.dz()), dt, 0.5, cn_roots));
    half_phase_.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        half_phase_[k] = std::exp(-I * pm.u.data()[k] * (0.5 * dt));
}

void Eq6Propagator::sweep_y(ComplexField2D& f) const {
    const Grid2D& g = grid_;
    CVec tmp(g.ny);
    for (int i = 0; i < g.nz; ++i) {
        cplx* row = &f(i, 0);
        ylines_[i].rhs.apply(row, tmp.data());
        for (const TridiagLU& lu : ylines_[i].solves) lu.solve(tmp.data());
        std::copy(tmp.begin(), tmp.end(), row);
    }
}

void Eq6Propagator::sweep_z(ComplexField2D& f) const {
    const Grid2D& g = grid_;
    CVec in(g.nz), out(g.nz);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nz; ++i) in[i] = f(i, j);
        zlines_[j].rhs.apply(in.data(), out.data());
        for (const TridiagLU& lu : zlines_[j].solves) lu.solve(out.data());
        for (int i = 0; i < g.nz; ++i) f(i, j) = out[i];
    }
}

void Eq6Propagator::step(ComplexField2D& f) const {
    if (!(f.grid() == grid_)) throw DomainError("field and propagator grids differ");
    CVec& v = f.data();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= half_phase_[k];
    sweep_y(f);
    sweep_z(f);
    sweep_y(f);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= half_phase_[k];
}

Trajectory evolve_dsp(ComplexField2D rho, const PotentialMap& pm, double dt, int steps,
                      const EvolveOptions& opt) {
    const Eq6Propagator prop(pm, dt);
    const double n0 = rho.norm2();
    if (!(n0 > 0.0) || !std::isfinite(n0)) throw ZeroNormError("initial state has no norm");
    Trajectory tr;
    double log_n = std::log(n0);
    rho *= 1.0 / std::sqrt(n0);
    auto sample = [&](int s) {
        TrajectoryRow row{s * dt, expectation_z(rho), expectation_y(rho), std::exp(log_n), log_n};
        tr.rows.push_back(row);
        if (opt.on_sample) opt.on_sample(row, rho);
    };
    sample(0);
    const int every = std::max(1, opt.sample_every);
    for (int s = 1; s <= steps; ++s) {
        prop.step(rho);
        const double n2 = rho.norm2();
        if (!std::isfinite(n2)) {
            std::ostringstream os;
            os << "non-finite norm at step " << s;
            throw NumericalError(os.str());
        }
        if (!(n2 > 0.0)) throw ZeroNormError("state vanished during evolution");
        tr.max_step_growth = std::max(tr.max_step_growth, n2);
        log_n += std::log(n2);
        rho *= 1.0 / std::sqrt(n2);
        if (log_n - std::log(n0) > std::log(opt.blowup_factor)) {
            std::ostringstream os;
            os << "norm grew by more than " << opt.blowup_factor << " at step " << s;
            throw StabilityError(os.str());
        }
        if (opt.finite_check_every > 0 && s % opt.finite_check_every == 0 && !rho.all_finite())
            throw NumericalError("non-finite value in the field");
        if (s % every == 0) sample(s);
    }
    tr.final_state = std::move(rho);
    return tr;
}

ComplexField2D separable_state(const Grid2D& g, const CVec& psi_z, double k_y) {
    if (static_cast<int>(psi_z.size()) != g.nz) throw DomainError("profile length differs from nz");
    ComplexField2D f(g);
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.ny; ++j) f(i, j) = psi_z[i] * std::cos(0.5 * k_y * g.y(j));
    const double n = f.norm();
    if (!(n > 0.0)) throw ZeroNormError("separable state has zero norm");
    f *= 1.0 / n;
    return f;
}

ComplexField2D coherent_state(const ParamSet& p, const DerivedConstants& d, const Grid2D& g,
                              double z0) {
    const HarmonicSolution hs = harmonic_solution(p, d, 0, 0);
    const cplx k2 = hs.kappa * hs.kappa;
    const double sigma = 1.0 / std::sqrt(k2.real());
    if (!(std::abs(z0) < g.z_half - 2.0 * sigma)) {
        std::ostringstream os;
        os << "displacement " << z0 << " mm leaves the grid (limit " << g.z_half - 2.0 * sigma << ")";
        throw DomainError(os.str());
    }
    CVec psi(g.nz);
    for (int i = 0; i < g.nz; ++i) {
        const double x = g.z(i) - z0;
        psi[i] = std::exp(-0.5 * k2 * x * x);
    }
    return separable_state(g, psi, d.k_y);
}

}  // namespace imt
