#include "imt/obe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "imt/analysis.hpp"
#include "imt/analytic.hpp"
#include "imt/error.hpp"

namespace imt {

namespace {

const cplx I(0.0, 1.0);

}  // namespace

AtomicFields& AtomicFields::operator*=(cplx s) {
    rho21 *= s;
    rho31_f *= s;
    rho31_b *= s;
    omega_p_f *= s;
    omega_p_b *= s;
    return *this;
}

bool AtomicFields::all_finite() const {
    return rho21.all_finite() && rho31_f.all_finite() && rho31_b.all_finite() &&
           omega_p_f.all_finite() && omega_p_b.all_finite();
}

ObeIntegrator::ObeIntegrator(const ControlFieldPair& cf, const ParamSet& p,
                             const DerivedConstants& d, double dt, const ObeOptions& opt)
    : grid_(cf.forward.grid()), cf_(cf), dt_(dt), delta_(p.delta_p), eta_(d.eta), k_p_(d.k_p),
      opt_(opt) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    if (dt > opt.max_dt) {
        std::ostringstream os;
        os << "dt = " << dt << " exceeds the accuracy bound " << opt.max_dt;
        throw StabilityError(os.str());
    }
    const int nz = grid_.nz;
    sponge_.assign(nz, 0.0);
    const int w = std::min(opt.sponge_cells, nz / 4);
    const double smax = opt.sponge_strength < 0.0 ? eta_ : opt.sponge_strength;
    for (int k = 0; k < w; ++k) {
        const double v = smax * std::pow(static_cast<double>(w - k) / w, 2);
        sponge_[k] = v;
        sponge_[nz - 1 - k] = v;
    }
    be_ = build(dt);
    bdf2_ = build(2.0 * dt / 3.0);
}

ObeIntegrator::Scheme ObeIntegrator::build(double beta) const {
    const Grid2D& g = grid_;
    const int ny = g.ny;
    const int n = 2 * (ny + 1);
    const double h = g.dy();
    const cplx ie = I * eta_;
    Scheme sc;
    sc.beta = beta;
    sc.k.resize(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
        const cplx F = cf_.forward.data()[c];
        const cplx B = cf_.backward.data()[c];
        Eigen::Matrix3cd a;
        a << 0.0, 0.5 * I * std::conj(F), 0.5 * I * std::conj(B),
             0.5 * I * F, -(0.5 + I * delta_), 0.0,
             0.5 * I * B, 0.0, -(0.5 + I * delta_);
        const Eigen::Matrix3cd k = (Eigen::Matrix3cd::Identity() - beta * a).inverse();
        for (int r = 0; r < 3; ++r)
            for (int q = 0; q < 3; ++q) sc.k[c][3 * r + q] = k(r, q);
    }
    const cplx pb = beta * 0.5 * I;
    for (int i = 0; i < g.nz; ++i) {
        BandLU m(n, 2, 2);
        const double s = sponge_[i];
        m.at(0, 0) = 1.0;
        m.at(2 * ny + 1, 2 * ny + 1) = 1.0;
        for (int j = 0; j < ny; ++j) {
            const auto& k = sc.k[g.index(i, j)];
            const cplx pff = pb * k[4], pfb = pb * k[5], pbf = pb * k[7], pbb = pb * k[8];
            const int f0 = 2 * j, b0 = 2 * j + 1, f1 = 2 * j + 2, b1 = 2 * j + 3;
            const int rf = f1, rb = b0;
            m.at(rf, f1) += 1.0 - 0.5 * h * ie * pff + 0.5 * h * s;
            m.at(rf, f0) += -1.0 - 0.5 * h * ie * pff + 0.5 * h * s;
            m.at(rf, b1) += -0.5 * h * ie * pfb;
            m.at(rf, b0) += -0.5 * h * ie * pfb;
            m.at(rb, b0) += 1.0 - 0.5 * h * ie * pbb + 0.5 * h * s;
            m.at(rb, b1) += -1.0 - 0.5 * h * ie * pbb + 0.5 * h * s;
            m.at(rb, f1) += -0.5 * h * ie * pbf;
            m.at(rb, f0) += -0.5 * h * ie * pbf;
        }
        m.factor();
        sc.columns.push_back(std::move(m));
    }
    return sc;
}

ComplexField2D ObeIntegrator::diffraction(const ComplexField2D& om) const {
    const Grid2D& g = grid_;
    ComplexField2D out(g);
    const cplx c = I / (2.0 * k_p_ * g.dz() * g.dz());
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const cplx up = i + 1 < g.nz ? om(i + 1, j) : 0.0;
            const cplx dn = i > 0 ? om(i - 1, j) : 0.0;
            out(i, j) = c * (up - 2.0 * om(i, j) + dn);
        }
    return out;
}

void ObeIntegrator::solve(const Scheme& sc, const std::vector<std::array<cplx, 3>>& r,
                          const ComplexField2D& df, const ComplexField2D& db,
                          AtomicFields& out) const {
    const Grid2D& g = grid_;
    const int ny = g.ny;
    const double h = g.dy();
    const cplx ie = I * eta_;
    const cplx pb = sc.beta * 0.5 * I;
    CVec rhs(2 * (ny + 1));
    std::vector<std::array<cplx, 3>> kr(ny);
    for (int i = 0; i < g.nz; ++i) {
        std::fill(rhs.begin(), rhs.end(), 0.0);
        for (int j = 0; j < ny; ++j) {
            const std::size_t c = g.index(i, j);
            const auto& k = sc.k[c];
            for (int a = 0; a < 3; ++a)
                kr[j][a] = k[3 * a] * r[c][0] + k[3 * a + 1] * r[c][1] + k[3 * a + 2] * r[c][2];
            rhs[2 * j + 2] = h * (ie * kr[j][1] + df(i, j));
            rhs[2 * j + 1] = h * (ie * kr[j][2] + db(i, j));
        }
        sc.columns[i].solve(rhs.data());
        for (int j = 0; j < ny; ++j) {
            const std::size_t c = g.index(i, j);
            const auto& k = sc.k[c];
            const cplx of = 0.5 * (rhs[2 * j] + rhs[2 * j + 2]);
            const cplx ob = 0.5 * (rhs[2 * j + 1] + rhs[2 * j + 3]);
            out.rho21(i, j) = kr[j][0] + pb * (k[1] * of + k[2] * ob);
            out.rho31_f(i, j) = kr[j][1] + pb * (k[4] * of + k[5] * ob);
            out.rho31_b(i, j) = kr[j][2] + pb * (k[7] * of + k[8] * ob);
            out.omega_p_f(i, j) = of;
            out.omega_p_b(i, j) = ob;
        }
    }
}

void ObeIntegrator::advance(AtomicState& s) const {
    if (!(s.rho21.grid() == grid_)) throw DomainError("state and integrator grids differ");
    const Grid2D& g = grid_;
    std::vector<std::array<cplx, 3>> r(g.size());
    AtomicFields next(g);
    if (!s.previous) {
        for (std::size_t c = 0; c < g.size(); ++c)
            r[c] = {s.rho21.data()[c], s.rho31_f.data()[c], s.rho31_b.data()[c]};
        solve(be_, r, diffraction(s.omega_p_f), diffraction(s.omega_p_b), next);
    } else {
        const AtomicFields& o = *s.previous;
        ComplexField2D ef(g), eb(g);
        for (std::size_t c = 0; c < g.size(); ++c) {
            r[c] = {(4.0 * s.rho21.data()[c] - o.rho21.data()[c]) / 3.0,
                    (4.0 * s.rho31_f.data()[c] - o.rho31_f.data()[c]) / 3.0,
                    (4.0 * s.rho31_b.data()[c] - o.rho31_b.data()[c]) / 3.0};
            ef.data()[c] = 2.0 * s.omega_p_f.data()[c] - o.omega_p_f.data()[c];
            eb.data()[c] = 2.0 * s.omega_p_b.data()[c] - o.omega_p_b.data()[c];
        }
        solve(bdf2_, r, diffraction(ef), diffraction(eb), next);
    }
    s.previous = std::move(static_cast<AtomicFields&>(s));
    static_cast<AtomicFields&>(s) = std::move(next);
    s.t += dt_;

    double top = 0.0;
    for (const cplx& v : s.rho21.data()) top = std::max(top, std::abs(v));
    if (!std::isfinite(top)) throw NumericalError("non-finite coherence");
    if (top > 0.0 && (top < 1e-100 || top > 1e100)) {
        s *= 1.0 / top;
        *s.previous *= 1.0 / top;
        s.log_scale += std::log(top);
    }
}

AtomicState step(const AtomicState& s, const ControlFieldPair& cf, const ParamSet& p,
                 const DerivedConstants& d, double dt) {
    AtomicState out = s;
    ObeIntegrator(cf, p, d, dt).advance(out);
    return out;
}

AtomicState stored_state(const Grid2D& g, const ComplexField2D& rho21) {
    if (!(rho21.grid() == g)) throw DomainError("coherence grid differs");
    AtomicState s(g);
    s.rho21 = rho21;
    return s;
}

AtomicState prepare_coherent_state(double z0, const ParamSet& p, const DerivedConstants& d) {
    const Grid2D g = Grid2D::from_params(p);
    return stored_state(g, coherent_state(p, d, g, z0));
}

AtomicState default_initial_state(const ParamSet& p, const DerivedConstants& d) {
    const Grid2D g = Grid2D::from_params(p);
    CVec psi(g.nz);
    for (int i = 0; i < g.nz; ++i) {
        const double x = g.z(i) / (2.0 * p.w0);
        psi[i] = std::exp(-x * x);
    }
    return stored_state(g, separable_state(g, psi, d.k_y));
}

Trajectory run_obe(AtomicState& s, const ObeIntegrator& integ, int steps, const ObeRunOptions& opt) {
    Trajectory tr;
    double last = 0.0;
    auto sample = [&]() {
        const double n2 = s.rho21.norm2();
        if (!(n2 > 0.0)) throw ZeroNormError("coherence vanished");
        TrajectoryRow row{s.t, expectation_z(s.rho21), expectation_y(s.rho21),
                          std::exp(std::log(n2) + 2.0 * s.log_scale), std::log(n2) + 2.0 * s.log_scale};
        tr.rows.push_back(row);
        if (opt.on_sample) opt.on_sample(row, s);
    };
    sample();
    last = tr.rows.back().log_norm2;
    const int every = std::max(1, opt.sample_every);
    for (int k = 1; k <= steps; ++k) {
        integ.advance(s);
        if (k % 100 == 0 && !s.all_finite()) throw NumericalError("non-finite field");
        if (k % every == 0) {
            sample();
            const double ln = tr.rows.back().log_norm2;
            tr.max_step_growth = std::max(tr.max_step_growth, std::exp((ln - last) / every));
            last = ln;
        }
    }
    tr.final_state = s.rho21;
    return tr;
}

double shape_distance(const ComplexField2D& a, const ComplexField2D& b) {
    const double ov = overlap(a, b);
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * ov));
}

RelaxResult relax_obe(const ParamSet& p, const DerivedConstants& d, const AtomicState& initial,
                      double tol, const RelaxOptions& opt) {
    if (initial.rho21.norm2() == 0.0) throw ZeroNormError("initial coherence is zero");
    const ControlFieldPair cf = control_fields(p, d, initial.rho21.grid());
    const double dt = p.grid.dt;
    const ObeIntegrator integ(cf, p, d, dt, opt.obe);
    const int every = std::max(1, static_cast<int>(std::lround(opt.check_interval / dt)));
    AtomicState s = initial;
    ComplexField2D last = s.rho21;
    RelaxResult res;
    for (int k = 1; k <= opt.max_steps; ++k) {
        integ.advance(s);
        res.steps = k;
        if (k % 100 == 0 && !s.all_finite()) throw NumericalError("non-finite field");
        if (k % every == 0) {
            res.last_change = shape_distance(last, s.rho21) / (every * dt);
            last = s.rho21;
            if (res.last_change < tol) {
                res.converged = true;
                break;
            }
        }
    }
    res.t_end = s.t;
    res.profile = s.rho21;
    res.profile *= 1.0 / res.profile.norm();
    return res;
}

ComplexField2D relax_to_steady_profile(const ParamSet& p, const DerivedConstants& d,
                                       const AtomicState& initial, double tol,
                                       const RelaxOptions& opt) {
    RelaxResult r = relax_obe(p, d, initial, tol, opt);
    if (!r.converged) {
        std::ostringstream os;
        os << "no steady profile after " << r.steps << " steps, shape change " << r.last_change;
        throw NonConvergenceError(os.str());
    }
    return std::move(r.profile);
}

}  // namespace imt
