#include "imt/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

#include <fmt/format.h>
#include "json.hpp"

#include "imt/analysis.hpp"
#include "imt/analytic.hpp"
#include "imt/error.hpp"
#include "imt/fields.hpp"
#include "imt/io.hpp"
#include "imt/obe.hpp"
#include "imt/schrodinger.hpp"
#include "imt/synthetic.hpp"

#ifndef IMT_VERSION
#define IMT_VERSION "0.0.0"
#endif

namespace imt {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

template <class T>
std::vector<T> parallel_map(int n, int workers, const std::function<T(int)>& fn) {
    std::vector<std::optional<T>> out(n);
    std::vector<std::exception_ptr> errs(n);
    std::atomic<int> next{0};
    auto work = [&] {
        for (int k = next++; k < n; k = next++) {
            try {
                out[k] = fn(k);
            } catch (...) {
                errs[k] = std::current_exception();
            }
        }
    };
    const int nt = std::clamp(workers, 1, std::max(1, n));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
    std::vector<T> res;
    res.reserve(n);
    for (auto& o : out) res.push_back(std::move(*o));
    return res;
}

struct Output {
    fs::path dir;
    RunManifest* manifest;
    std::mutex mu;

    void table(const std::string& name, const CsvTable& t) {
        write_csv((dir / name).string(), t);
        std::lock_guard lock(mu);
        manifest->outputs.push_back(name);
    }
    void snapshot(const std::string& name, const ComplexField2D& f, double t) {
        write_snapshot((dir / name).string(), f, t);
        std::lock_guard lock(mu);
        manifest->outputs.push_back(name);
    }
    void warn(const std::string& w) {
        std::lock_guard lock(mu);
        manifest->warnings.push_back(w);
    }
};

RVec values_or(const RVec& v, double fallback) { return v.empty() ? RVec{fallback} : v; }

void normalize_profile(CVec& psi, double dz) {
    double n2 = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        n2 += std::norm(psi[i]);
        if (std::abs(psi[i]) > std::abs(psi[imax])) imax = i;
    }
    n2 *= dz;
    if (!(n2 > 0.0)) throw ZeroNormError("profile has zero norm");
    const cplx ph = std::abs(psi[imax]) > 0.0 ? std::conj(psi[imax]) / std::abs(psi[imax]) : 1.0;
    for (auto& v : psi) v *= ph / std::sqrt(n2);
}

CsvTable profile_table(const RVec& z, const CVec& psi) {
    CsvTable t{"imt.profile/v1", {"z_mm", "re", "im", "abs2"}, {}};
    for (std::size_t i = 0; i < z.size(); ++i)
        t.rows.push_back({z[i], psi[i].real(), psi[i].imag(), std::norm(psi[i])});
    return t;
}

CVec center_cut(const ComplexField2D& f) {
    const Grid2D& g = f.grid();
    const int hi = g.ny / 2;
    const int lo = g.ny % 2 ? hi : hi - 1;
    CVec psi(g.nz);
    for (int i = 0; i < g.nz; ++i) psi[i] = 0.5 * (f(i, lo) + f(i, hi));
    normalize_profile(psi, g.dz());
    return psi;
}

RVec real_abs2(const CVec& v) {
    RVec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = std::norm(v[i]);
    return r;
}

double try_value(Output& out, const std::string& what, const std::function<double()>& f) {
    try {
        return f();
    } catch (const Error& e) {
        out.warn(what + ": " + e.what());
        return nan;
    }
}

int steps_for(double duration, double dt) { return static_cast<int>(std::lround(duration / dt)); }
int stride_for(double interval, double dt) {
    return std::max(1, static_cast<int>(std::lround(interval / dt)));
}

CsvTable trajectory_table(const Trajectory& tr, const Units& u) {
    CsvTable t{"imt.trajectory/v1", {"t_us", "z_mean_mm", "y_mean_mm", "norm2", "log_norm2"}, {}};
    for (const auto& r : tr.rows) t.rows.push_back({u.to_us(r.t), r.z_mean, r.y_mean, r.norm2, r.log_norm2});
    return t;
}

struct SnapshotPlan {
    RVec times;
    std::vector<bool> done;
    double tolerance;
    std::string prefix;

    template <class F>
    void maybe(double t, F&& write) {
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (done[k] || t < times[k] - tolerance) continue;
            done[k] = true;
            write(fmt::format("{}_s{}.bin", prefix, k));
        }
    }
};

const std::vector<std::string> kOscColumns{
    "delta_p",     "f_khz",  "kappa_khz",  "amplitude_mm", "offset_mm", "rms_mm",
    "fit_converged", "zero_crossings", "underdamped", "decay_khz", "chi_khz", "re_omega0_khz"};

RVec oscillation_row(Output& out, const ParamSet& p, const DerivedConstants& d,
                     const Trajectory& tr, const std::string& label) {
    const Units u(p);
    TimeSeries ts;
    RVec logn;
    for (const auto& r : tr.rows) {
        ts.times.push_back(u.to_us(r.t));
        ts.values.push_back(r.z_mean);
        logn.push_back(r.log_norm2);
    }
    ts.label = label;
    FitResult fit{nan, nan, nan, nan, nan, false};
    try {
        fit = fit_damped_cosine(ts);
    } catch (const Error& e) {
        out.warn(label + " fit: " + e.what());
    }
    const int crossings = count_zero_crossings(ts.values);
    double decay = nan;
    try {
        decay = log_decay_rate(ts.times, logn).rate;
    } catch (const Error& e) {
        out.warn(label + " decay: " + e.what());
    }
    const double chi = try_value(out, label + " chi", [&] { return u.to_khz(decay_rate(p, d).chi); });
    const double w0 = try_value(out, label + " omega0", [&] { return u.to_khz(trap_frequency(p, d, 0).real()); });
    return {p.delta_p, fit.f, fit.kappa, fit.amplitude, fit.offset, fit.rms_residual,
            fit.converged ? 1.0 : 0.0, static_cast<double>(crossings), crossings >= 2 ? 1.0 : 0.0,
            decay, chi, w0};
}

Trajectory eq6_trajectory(Output& out, const ParamSet& p, const DerivedConstants& d,
                          const ComplexField2D& initial, const RunSettings& r, const std::string& label) {
    const Grid2D g = initial.grid();
    const PotentialMap pm = potential_map(control_fields(p, d, g), p, d);
    const double dt = p.grid.dt;
    const int stride = stride_for(r.sample_interval, dt);
    SnapshotPlan plan{r.snapshot_times, std::vector<bool>(r.snapshot_times.size(), false),
                      0.5 * stride * dt, label};
    EvolveOptions opt;
    opt.sample_every = stride;
    opt.on_sample = [&](const TrajectoryRow& row, const ComplexField2D& f) {
        plan.maybe(row.t, [&](const std::string& name) {
            ComplexField2D s = f;
            s *= std::exp(0.5 * row.log_norm2);
            out.snapshot(name, s, row.t);
        });
    };
    return evolve_dsp(initial, pm, dt, steps_for(r.duration, dt), opt);
}

Trajectory obe_trajectory(Output& out, const ParamSet& p, const DerivedConstants& d, AtomicState s,
                          const RunSettings& r, const std::string& label) {
    const ControlFieldPair cf = control_fields(p, d, s.rho21.grid());
    const double dt = p.grid.dt;
    const ObeIntegrator integ(cf, p, d, dt);
    const int stride = stride_for(r.sample_interval, dt);
    SnapshotPlan plan{r.snapshot_times, std::vector<bool>(r.snapshot_times.size(), false),
                      0.5 * stride * dt, label};
    ObeRunOptions opt;
    opt.sample_every = stride;
    opt.on_sample = [&](const TrajectoryRow& row, const AtomicState& st) {
        plan.maybe(row.t, [&](const std::string& name) {
            ComplexField2D f = st.rho21;
            f *= std::exp(st.log_scale);
            out.snapshot(name, f, row.t);
        });
    };
    return run_obe(s, integ, steps_for(r.duration, dt), opt);
}

// ---- modes ---------------------------------------------------------------

void mode_potentials(const Config& c, Output& out) {
    const ParamSet& p = c.params;
    const DerivedConstants d = derive_constants(p);
    const Grid2D g = Grid2D::from_params(p);
    const PotentialMap pm = potential_map(control_fields(p, d, g), p, d);
    CsvTable t{"imt.potential_map/v1",
               {"z_mm", "y_mm", "re_mz", "im_mz", "re_my", "im_my", "re_az", "im_az", "re_ay", "im_ay",
                "re_u", "im_u"},
               {}};
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.ny; ++j)
            t.rows.push_back({g.z(i), g.y(j), pm.m_z(i, j).real(), pm.m_z(i, j).imag(), pm.m_y(i, j).real(),
                              pm.m_y(i, j).imag(), pm.a_z(i, j).real(), pm.a_z(i, j).imag(),
                              pm.a_y(i, j).real(), pm.a_y(i, j).imag(), pm.u(i, j).real(), pm.u(i, j).imag()});
    out.table("potential_map.csv", t);

    const RegimeReport rr = validate_regime(p);
    for (const auto& w : rr.warnings) out.warn(w);
    if (!rr.uniform_in_y) {
        out.warn("outside the y-uniform regime; trap profile skipped");
        return;
    }
    const Units u(p);
    const ImtProfile prof = imt_profile(p, d, 0);
    CsvTable tp{"imt.trap_profile/v1", {"z_mm", "re_u0", "im_u0", "re_u0_khz", "im_u0_khz"}, {}};
    for (std::size_t i = 0; i < prof.z.size(); ++i)
        tp.rows.push_back({prof.z[i], prof.u_m[i].real(), prof.u_m[i].imag(), u.to_khz(prof.u_m[i].real()),
                           u.to_khz(prof.u_m[i].imag())});
    out.table("trap_profile.csv", tp);
    out.table("trap_depth.csv",
              CsvTable{"imt.trap_depth/v1",
                       {"m", "re_depth", "im_depth", "re_depth_numeric", "im_depth_numeric", "z_far_mm"},
                       {{0.0, prof.depth.real(), prof.depth.imag(), prof.depth_numeric.real(),
                         prof.depth_numeric.imag(), prof.z_far}}});
}

RVec sweep_values(const RunSettings& r) {
    if (!r.sweep_values.empty()) return r.sweep_values;
    if (r.sweep_parameter == "phi") {
        RVec v;
        for (int k = 0; k <= 30; ++k) v.push_back(0.01 * k * std::numbers::pi);
        return v;
    }
    return {};
}

double parameter_value(const ParamSet& p, const std::string& name) {
    if (name == "omega") return p.omega;
    if (name == "alpha") return p.alpha;
    if (name == "phi") return p.phi;
    if (name == "delta_p") return p.delta_p;
    if (name == "w0") return p.w0;
    if (name == "xi") return p.xi;
    if (name == "medium_length") return p.medium_length;
    if (name == "lambda_p") return p.lambda_p;
    if (name == "lambda_c") return p.lambda_c;
    throw ConfigError("parameter '" + name + "' cannot be swept");
}

CsvTable analytic_table(const Config& c, Output& out, int workers, const std::string& schema) {
    const ParamSet& base = c.params;
    const std::string& name = c.run.sweep_parameter;
    RVec vals = sweep_values(c.run);
    if (vals.empty()) vals = {parameter_value(base, name)};
    const Units u(base);
    auto rows = parallel_map<RVec>(static_cast<int>(vals.size()), workers, [&](int k) {
        ParamSet p = base;
        set_parameter(p, name, vals[k]);
        validate(p);
        const DerivedConstants d = derive_constants(p);
        const std::string tag = fmt::format("{}={}", name, format_number(vals[k]));
        RVec row{vals[k]};
        cplx w0(nan, nan), nu(nan, nan), dep(nan, nan);
        try {
            w0 = trap_frequency(p, d, 0);
            nu = harmonic_solution(p, d, 0, 0).nu_nm;
        } catch (const Error& e) {
            out.warn(tag + ": " + e.what());
        }
        try {
            dep = trap_depth(p, d, 0);
        } catch (const Error& e) {
            out.warn(tag + ": " + e.what());
        }
        auto quiet = [](const std::function<double()>& f) {
            try {
                return f();
            } catch (const DomainError&) {
                return nan;
            } catch (const NoThresholdError&) {
                return nan;
            }
        };
        const double sigma = quiet([&] { return ground_width(p, d); });
        const double chi = quiet([&] { return decay_rate(p, d).chi; });
        const double ys = quiet([&] { return displacement_y(displacement_wavenumber(p, d), d.k_y); });
        const double phic = quiet([&] { return critical_phase(p, d); });
        row.insert(row.end(), {u.to_khz(w0.real()), u.to_khz(w0.imag()), nu.real(), nu.imag(), dep.real(),
                               dep.imag(), sigma, chi, ys, phic, phic / std::numbers::pi});
        return row;
    });
    CsvTable t{schema,
               {name, "re_omega0_khz", "im_omega0_khz", "re_nu00", "im_nu00", "re_d0", "im_d0", "sigma_mm",
                "chi", "y_shift_mm", "phi_c", "phi_c_over_pi"},
               std::move(rows)};
    return t;
}

void mode_analytic_sweep(const Config& c, Output& out, int workers) {
    out.table("analytic_sweep.csv", analytic_table(c, out, workers, "imt.analytic_sweep/v1"));
}

struct EigenPoint {
    RVec z;
    ModeSet modes;
    std::vector<HarmonicSolution> analytic;
};

EigenPoint eigen_point(const ParamSet& p, int k) {
    const DerivedConstants d = derive_constants(p);
    const Hamiltonian1D h = build_hamiltonian_1d(p, d, 0);
    EigenOptions opt;
    opt.seeds = analytic_seeds(p, d, 0, k);
    EigenPoint e{h.z, eigenmodes(h, k, opt), {}};
    for (int n = 0; n < k; ++n) e.analytic.push_back(harmonic_solution(p, d, n, 0));
    return e;
}

void mode_eigen(const Config& c, Output& out, int workers) {
    const RVec dets = values_or(c.run.detunings, c.params.delta_p);
    const int k = c.run.modes;
    auto pts = parallel_map<EigenPoint>(static_cast<int>(dets.size()), workers, [&](int q) {
        ParamSet p = c.params;
        p.delta_p = dets[q];
        return eigen_point(p, k);
    });
    CsvTable vals{"imt.eigenvalues/v1",
                  {"delta_p", "n", "re_nu", "im_nu", "re_nu_analytic", "im_nu_analytic", "residual",
                   "converged", "overlap_analytic", "width_mm", "sigma_mm"},
                  {}};
    for (std::size_t q = 0; q < dets.size(); ++q) {
        ParamSet p = c.params;
        p.delta_p = dets[q];
        const DerivedConstants d = derive_constants(p);
        const EigenPoint& e = pts[q];
        const double sigma = try_value(out, "sigma", [&] { return ground_width(p, d); });
        CsvTable prof{"imt.modes/v1", {"z_mm"}, {}};
        for (int n = 0; n < k; ++n) {
            prof.columns.push_back(fmt::format("re_{}", n));
            prof.columns.push_back(fmt::format("im_{}", n));
        }
        for (std::size_t i = 0; i < e.z.size(); ++i) {
            RVec row{e.z[i]};
            for (int n = 0; n < k; ++n) {
                row.push_back(e.modes.eigenvectors[n][i].real());
                row.push_back(e.modes.eigenvectors[n][i].imag());
            }
            prof.rows.push_back(row);
        }
        out.table(fmt::format("eigen_modes_{}.csv", q), prof);
        for (int n = 0; n < k; ++n) {
            const cplx nu = e.modes.eigenvalues[n];
            const cplx na = e.analytic[n].nu_nm;
            const double ov = overlap(e.modes.eigenvectors[n], e.analytic[n].sample(e.z));
            const double w = n == 0 ? try_value(out, "width", [&] {
                return half_width(e.z, real_abs2(e.modes.eigenvectors[0]));
            })
                                    : nan;
            vals.rows.push_back({dets[q], double(n), nu.real(), nu.imag(), na.real(), na.imag(),
                                 e.modes.residuals[n], e.modes.converged[n] ? 1.0 : 0.0, ov, w,
                                 n == 0 ? sigma : nan});
        }
    }
    out.table("eigenvalues.csv", vals);
}

std::string tag(const char* what, std::size_t k) { return fmt::format("{}_{}", what, k); }

void mode_evolve_eq6(const Config& c, Output& out, int workers, const std::string& prefix) {
    const RVec dets = values_or(c.run.detunings, c.params.delta_p);
    auto rows = parallel_map<RVec>(static_cast<int>(dets.size()), workers, [&](int q) {
        ParamSet p = c.params;
        p.delta_p = dets[q];
        const DerivedConstants d = derive_constants(p);
        const Grid2D g = Grid2D::from_params(p);
        const std::string label = tag(prefix.c_str(), q);
        const Trajectory tr = eq6_trajectory(out, p, d, coherent_state(p, d, g, c.run.z0), c.run, label);
        out.table(label + "_trajectory.csv", trajectory_table(tr, Units(p)));
        return oscillation_row(out, p, d, tr, label);
    });
    out.table(prefix + "_summary.csv", CsvTable{"imt.oscillation/v1", kOscColumns, std::move(rows)});
}

void mode_evolve_obe(const Config& c, Output& out, int workers) {
    const RVec dets = values_or(c.run.detunings, c.params.delta_p);
    auto rows = parallel_map<RVec>(static_cast<int>(dets.size()), workers, [&](int q) {
        ParamSet p = c.params;
        p.delta_p = dets[q];
        const DerivedConstants d = derive_constants(p);
        const std::string label = tag("obe", q);
        const Trajectory tr = obe_trajectory(out, p, d, prepare_coherent_state(c.run.z0, p, d), c.run, label);
        out.table(label + "_trajectory.csv", trajectory_table(tr, Units(p)));
        return oscillation_row(out, p, d, tr, label);
    });
    out.table("obe_summary.csv", CsvTable{"imt.oscillation/v1", kOscColumns, std::move(rows)});
}

void mode_fig1(const Config& c, Output& out, int workers) {
    const RVec dets = values_or(c.run.detunings, c.params.delta_p);
    const RVec alphas = values_or(c.run.alphas, c.params.alpha);
    const int n = static_cast<int>(dets.size() * alphas.size());
    auto profs = parallel_map<ImtProfile>(n, workers, [&](int k) {
        ParamSet p = c.params;
        p.delta_p = dets[k / alphas.size()];
        p.alpha = alphas[k % alphas.size()];
        validate(p);
        return imt_profile(p, derive_constants(p), 0);
    });
    CsvTable curves{"imt.fig1_potential/v1", {"delta_p", "alpha", "z_mm", "re_u0", "im_u0"}, {}};
    CsvTable summary{"imt.fig1_summary/v1",
                     {"delta_p", "alpha", "re_depth", "im_depth", "re_curvature", "im_curvature",
                      "convex"},
                     {}};
    for (int k = 0; k < n; ++k) {
        const double dp = dets[k / alphas.size()], al = alphas[k % alphas.size()];
        const ImtProfile& pr = profs[k];
        for (std::size_t i = 0; i < pr.z.size(); ++i)
            curves.rows.push_back({dp, al, pr.z[i], pr.u_m[i].real(), pr.u_m[i].imag()});
        ParamSet p = c.params;
        p.delta_p = dp;
        p.alpha = al;
        const DerivedConstants d = derive_constants(p);
        const double h = 1e-3 * p.w0;
        const cplx curv = (imt_potential(p, d, 0, h) - 2.0 * imt_potential(p, d, 0, 0.0) +
                           imt_potential(p, d, 0, -h)) /
                          (h * h);
        summary.rows.push_back({dp, al, pr.depth.real(), pr.depth.imag(), curv.real(), curv.imag(),
                                curv.real() > 0.0 ? 1.0 : 0.0});
    }
    out.table("fig1_potential.csv", curves);
    out.table("fig1_summary.csv", summary);
}

struct GroundPoint {
    RVec z;
    CVec analytic, eigen, obe, analytic1, eigen1;
    RelaxResult relax;
};

bool has_central_node(const CVec& psi) {
    const RVec d = real_abs2(psi);
    const double peak = *std::max_element(d.begin(), d.end());
    const std::size_t hi = d.size() / 2, lo = d.size() % 2 ? hi : hi - 1;
    return 0.5 * (d[lo] + d[hi]) < 0.05 * peak;
}

void mode_fig2(const Config& c, Output& out, int workers) {
    const RVec dets = values_or(c.run.detunings, c.params.delta_p);
    const int k = std::max(2, c.run.modes);
    auto pts = parallel_map<GroundPoint>(static_cast<int>(dets.size()), workers, [&](int q) {
        ParamSet p = c.params;
        p.delta_p = dets[q];
        const DerivedConstants d = derive_constants(p);
        const EigenPoint e = eigen_point(p, k);
        GroundPoint gp;
        gp.z = e.z;
        gp.analytic = e.analytic[0].sample(e.z);
        gp.analytic1 = e.analytic[1].sample(e.z);
        gp.eigen = e.modes.eigenvectors[0];
        gp.eigen1 = e.modes.eigenvectors[1];
        const double dz = e.z[1] - e.z[0];
        normalize_profile(gp.analytic, dz);
        normalize_profile(gp.analytic1, dz);
        RelaxOptions ro;
        ro.max_steps = std::min(c.run.relax_max_steps, std::max(1, steps_for(c.run.duration, p.grid.dt)));
        gp.relax = relax_obe(p, d, default_initial_state(p, d), c.run.relax_tol, ro);
        gp.obe = center_cut(gp.relax.profile);
        return gp;
    });
    CsvTable summary{"imt.fig2_ground/v1",
                     {"delta_p", "overlap_analytic_eigen", "overlap_analytic_obe", "overlap_eigen_obe",
                      "obe_converged", "obe_t_us", "obe_last_change", "excited_node_eigen",
                      "excited_node_analytic"},
                     {}};
    const Units u(c.params);
    for (std::size_t q = 0; q < dets.size(); ++q) {
        const GroundPoint& gp = pts[q];
        out.table(fmt::format("fig2_ground_{}_analytic.csv", q), profile_table(gp.z, gp.analytic));
        out.table(fmt::format("fig2_ground_{}_eigen.csv", q), profile_table(gp.z, gp.eigen));
        out.table(fmt::format("fig2_ground_{}_obe.csv", q), profile_table(gp.z, gp.obe));
        out.table(fmt::format("fig2_excited_{}_analytic.csv", q), profile_table(gp.z, gp.analytic1));
        out.table(fmt::format("fig2_excited_{}_eigen.csv", q), profile_table(gp.z, gp.eigen1));
        if (!gp.relax.converged)
            out.warn(fmt::format("OBE relaxation at delta_p={} stopped before convergence", dets[q]));
        summary.rows.push_back({dets[q], overlap(gp.analytic, gp.eigen), overlap(gp.analytic, gp.obe),
                                overlap(gp.eigen, gp.obe), gp.relax.converged ? 1.0 : 0.0,
                                u.to_us(gp.relax.t_end), gp.relax.last_change,
                                has_central_node(gp.eigen1) ? 1.0 : 0.0,
                                has_central_node(gp.analytic1) ? 1.0 : 0.0});
    }
    out.table("fig2_ground.csv", summary);

    RVec sweep = c.run.sweep_parameter == "delta_p" ? c.run.sweep_values : RVec{};
    if (sweep.empty()) sweep = dets;
    auto rows = parallel_map<RVec>(static_cast<int>(sweep.size()), workers, [&](int q) {
        ParamSet p = c.params;
        p.delta_p = sweep[q];
        const DerivedConstants d = derive_constants(p);
        const EigenPoint e = eigen_point(p, 1);
        const CentralQuantities cq = central_quantities(p, d);
        const cplx nu = e.modes.eigenvalues[0];
        return RVec{sweep[q], ground_width(p, d), half_width(e.z, real_abs2(e.modes.eigenvectors[0])),
                    decay_rate(p, d).chi, -2.0 * nu.imag(), nu.real(), nu.imag(), cq.theta};
    });
    out.table("fig2_sweep.csv",
              CsvTable{"imt.fig2_sweep/v1",
                       {"delta_p", "sigma_mm", "width_eigen_mm", "chi", "chi_eigen", "re_nu00", "im_nu00",
                        "mass_angle"},
                       std::move(rows)});
}

void mode_fig4(const Config& c, Output& out, int workers) {
    const RVec phis = values_or(c.run.phis, c.params.phi);
    ParamSet p0 = c.params;
    p0.phi = 0.0;
    const DerivedConstants d0 = derive_constants(p0);
    const Grid2D g = Grid2D::from_params(p0);
    const CVec psi = harmonic_solution(p0, d0, 0, 0).sample(g.z_axis());
    RunSettings r = c.run;
    r.snapshot_times.clear();
    auto rows = parallel_map<RVec>(static_cast<int>(phis.size()), workers, [&](int q) {
        ParamSet p = c.params;
        p.phi = phis[q];
        const DerivedConstants d = derive_constants(p);
        const Trajectory tr =
            eq6_trajectory(out, p, d, separable_state(g, psi, d.k_y), r, tag("fig4", q));
        const ComplexField2D& f = tr.final_state;
        const RVec mz = density_z_marginal(f);
        const RVec my = density_y_center(f);
        CsvTable dz{"imt.fig4_density_z/v1", {"z_mm", "density"}, {}};
        for (int i = 0; i < g.nz; ++i) dz.rows.push_back({g.z(i), mz[i]});
        out.table(fmt::format("fig4_density_z_{}.csv", q), dz);
        CsvTable dy{"imt.fig4_density_y/v1", {"y_mm", "density"}, {}};
        for (int j = 0; j < g.ny; ++j) dy.rows.push_back({g.y(j), my[j]});
        out.table(fmt::format("fig4_density_y_{}.csv", q), dy);
        const PeakReport pk = detect_split(mz);
        const double ys = displacement_y(displacement_wavenumber(p, d), d.k_y);
        return RVec{phis[q], phis[q] / std::numbers::pi, expectation_y_at_center(f), ys,
                    pk.split ? 1.0 : 0.0, static_cast<double>(pk.peaks.size()), Units(p).to_us(tr.rows.back().t)};
    });
    out.table("fig4_displacement.csv",
              CsvTable{"imt.fig4_displacement/v1",
                       {"phi", "phi_over_pi", "y_center_mm", "y_closed_mm", "split", "peaks", "t_us"},
                       std::move(rows)});
    Config sc = c;
    sc.run.sweep_parameter = "phi";
    out.table("fig4_phase_sweep.csv", analytic_table(sc, out, workers, "imt.analytic_sweep/v1"));
}

json params_json(const ParamSet& p, bool si) {
    const Units u(p);
    const double f = si ? p.gamma_si : 1.0;
    const double l = si ? 1e-3 : 1.0;
    json j{{"gamma", si ? p.gamma_si : 1.0},
           {"omega", p.omega * f},
           {"alpha", p.alpha},
           {"phi", p.phi},
           {"delta_p", p.delta_p * f},
           {"w0", p.w0 * l},
           {"xi", p.xi},
           {"medium_length", p.medium_length * l},
           {"lambda_p", p.lambda_p * l},
           {"lambda_c", p.lambda_c * l},
           {"grid",
            {{"nz", p.grid.nz},
             {"ny", p.grid.ny},
             {"z_half_extent", z_half_extent(p) * l},
             {"dt", si ? u.to_seconds(p.grid.dt) : p.grid.dt}}}};
    j["units"] = si ? json{{"frequency", "rad/s"}, {"length", "m"}, {"time", "s"}, {"angle", "rad"}}
                    : json{{"frequency", "Gamma"}, {"length", "mm"}, {"time", "1/Gamma"}, {"angle", "rad"}};
    return j;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                       tm.tm_hour, tm.tm_min, tm.tm_sec);
}

}  // namespace

const std::vector<std::string>& run_modes() {
    static const std::vector<std::string> m{"potentials", "analytic-sweep", "eigen", "evolve-eq6",
                                            "evolve-obe", "fig1", "fig2", "fig3", "fig4"};
    return m;
}

std::string toolkit_version() { return IMT_VERSION; }

void set_parameter(ParamSet& p, const std::string& name, double v) {
    if (name == "omega") p.omega = v;
    else if (name == "alpha") p.alpha = v;
    else if (name == "phi") p.phi = v;
    else if (name == "delta_p") p.delta_p = v;
    else if (name == "w0") p.w0 = v;
    else if (name == "xi") p.xi = v;
    else if (name == "medium_length") p.medium_length = v;
    else if (name == "lambda_p") p.lambda_p = v;
    else if (name == "lambda_c") p.lambda_c = v;
    else throw ConfigError("parameter '" + name + "' cannot be swept");
}

RunManifest run(const std::string& mode, const Config& cfg, const std::string& out_dir, int workers) {
    if (std::find(run_modes().begin(), run_modes().end(), mode) == run_modes().end())
        throw ConfigError("unknown mode '" + mode + "'");
    validate(cfg.params);
    RunManifest m;
    m.mode = mode;
    m.config = cfg;
    m.config_hash = config_hash(cfg);
    m.version = toolkit_version();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    Output out{out_dir, &m, {}};
    workers = std::max(1, workers);
    if (mode == "potentials") mode_potentials(cfg, out);
    else if (mode == "analytic-sweep") mode_analytic_sweep(cfg, out, workers);
    else if (mode == "eigen") mode_eigen(cfg, out, workers);
    else if (mode == "evolve-eq6") mode_evolve_eq6(cfg, out, workers, "eq6");
    else if (mode == "evolve-obe") mode_evolve_obe(cfg, out, workers);
    else if (mode == "fig1") mode_fig1(cfg, out, workers);
    else if (mode == "fig2") mode_fig2(cfg, out, workers);
    else if (mode == "fig3") mode_evolve_eq6(cfg, out, workers, "fig3");
    else mode_fig4(cfg, out, workers);
    std::sort(m.outputs.begin(), m.outputs.end());
    std::sort(m.warnings.begin(), m.warnings.end());
    m.warnings.erase(std::unique(m.warnings.begin(), m.warnings.end()), m.warnings.end());
    m.timestamp = utc_now();
    m.outputs.push_back("manifest.json");
    std::ofstream f(fs::path(out_dir) / "manifest.json");
    if (!f) throw IoError("cannot write manifest in " + out_dir);
    f << manifest_json(m) << "\n";
    return m;
}

std::string manifest_json(const RunManifest& m) {
    const RunSettings& r = m.config.run;
    json j{{"config_hash", m.config_hash},
           {"toolkit_version", m.version},
           {"timestamp", m.timestamp},
           {"mode", m.mode},
           {"source", m.config.source},
           {"params", {{"internal", params_json(m.config.params, false)}, {"si", params_json(m.config.params, true)}}},
           {"run",
            {{"duration", r.duration},
             {"sample_interval", r.sample_interval},
             {"z0", r.z0},
             {"modes", r.modes},
             {"relax_tol", r.relax_tol},
             {"relax_max_steps", r.relax_max_steps},
             {"sweep", {{"parameter", r.sweep_parameter}, {"values", r.sweep_values}}},
             {"detunings", r.detunings},
             {"alphas", r.alphas},
             {"phis", r.phis},
             {"snapshot_times", r.snapshot_times}}},
           {"outputs", m.outputs},
           {"warnings", m.warnings}};
    return j.dump(2);
}

CompareReport compare(const std::string& path_a, const std::string& path_b, const std::string& metric) {
    const CsvTable a = read_csv(path_a), b = read_csv(path_b);
    if (a.schema != b.schema)
        throw SchemaMismatchError("schemas differ: '" + a.schema + "' vs '" + b.schema + "'");
    if (a.rows.size() != b.rows.size()) throw SchemaMismatchError("row counts differ");
    CompareReport rep;
    rep.metric = metric;
    if (metric == "overlap") {
        const RVec za = column(a, "z_mm"), zb = column(b, "z_mm");
        for (std::size_t i = 0; i < za.size(); ++i)
            if (std::abs(za[i] - zb[i]) > 1e-9 * (1.0 + std::abs(za[i])))
                throw SchemaMismatchError("profiles are sampled on different z axes");
        const RVec ra = column(a, "re"), ia = column(a, "im"), rb = column(b, "re"), ib = column(b, "im");
        CVec pa(ra.size()), pb(rb.size());
        for (std::size_t i = 0; i < ra.size(); ++i) {
            pa[i] = {ra[i], ia[i]};
            pb[i] = {rb[i], ib[i]};
        }
        rep.value = overlap(pa, pb);
        rep.deviation = std::sqrt(std::max(0.0, 2.0 - 2.0 * rep.value));
        return rep;
    }
    if (metric != "relative") throw ConfigError("unknown metric '" + metric + "'");
    for (const std::string& name : a.columns) {
        if (std::find(b.columns.begin(), b.columns.end(), name) == b.columns.end())
            throw SchemaMismatchError("column '" + name + "' missing from " + path_b);
        const RVec x = column(a, name), y = column(b, name);
        double rel = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (std::isnan(x[i]) && std::isnan(y[i])) continue;
            const double diff = std::abs(x[i] - y[i]);
            const double scale = std::max(std::abs(x[i]), std::abs(y[i]));
            rel = std::max(rel, scale > 0.0 ? diff / scale : 0.0);
            if (std::isnan(diff)) rel = std::numeric_limits<double>::infinity();
            rep.deviation = std::max(rep.deviation, diff);
        }
        rep.per_column[name] = rel;
        rep.value = std::max(rep.value, rel);
    }
    return rep;
}

std::string compare_json(const CompareReport& r) {
    json j{{"metric", r.metric}, {"value", r.value}, {"deviation", r.deviation}};
    if (!r.per_column.empty()) j["per_column"] = r.per_column;
    return j.dump(2);
}

}  // namespace imt
