#include "imt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "imt/error.hpp"

namespace imt {

namespace {

constexpr double pi = std::numbers::pi;

struct LineFit {
    double slope;
    double intercept;
};

LineFit linear_fit(const double* x, const double* y, std::size_t n) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw DegenerateSeriesError("linear fit over a single abscissa");
    const double slope = (n * sxy - sx * sy) / den;
    return {slope, (sy - slope * sx) / n};
}

// Best amplitude/offset and squared error for fixed (kappa, f).
struct Projection {
    double a, c, sse;
};

Projection project(const RVec& tau, const RVec& y, double kappa, double f) {
    double s11 = 0, s12 = 0, s1y = 0, sy = 0;
    const double n = static_cast<double>(y.size());
    RVec b(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        b[i] = std::exp(-kappa * tau[i]) * std::cos(f * tau[i]);
        s11 += b[i] * b[i];
        s12 += b[i];
        s1y += b[i] * y[i];
        sy += y[i];
    }
    const double det = s11 * n - s12 * s12;
    Projection p{0.0, sy / n, 0.0};
    if (std::abs(det) > 1e-14 * std::max(1.0, s11 * n)) {
        p.a = (s1y * n - s12 * sy) / det;
        p.c = (s11 * sy - s12 * s1y) / det;
    }
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double r = p.a * b[i] + p.c - y[i];
        p.sse += r * r;
    }
    return p;
}

}  // namespace

void check_series(const TimeSeries& s) {
    if (s.times.size() != s.values.size()) throw ValidationError("times and values differ in length");
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        if (!std::isfinite(s.times[i]) || !std::isfinite(s.values[i]))
            throw ValidationError("non-finite sample in time series");
        if (i > 0 && !(s.times[i] > s.times[i - 1]))
            throw ValidationError("time series must be strictly increasing");
    }
}

double weighted_mean(const RVec& x, const RVec& density) {
    double s = 0.0, w = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += x[i] * density[i];
        w += density[i];
    }
    if (!(w > 0.0)) throw ZeroNormError("density integrates to zero");
    return s / w;
}

// The grid is cell centred, so the trapezoid rule with zero wall values
// reduces to uniform weights on the samples.
double expectation_z(const ComplexField2D& f) {
    const Grid2D& g = f.grid();
    RVec w(g.nz, 0.0);
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.ny; ++j) w[i] += std::norm(f(i, j));
    return weighted_mean(g.z_axis(), w);
}

double expectation_y(const ComplexField2D& f) {
    const Grid2D& g = f.grid();
    RVec w(g.ny, 0.0);
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.ny; ++j) w[j] += std::norm(f(i, j));
    return weighted_mean(g.y_axis(), w);
}

RVec density_y_center(const ComplexField2D& f) {
    const Grid2D& g = f.grid();
    RVec w(g.ny);
    const int hi = g.nz / 2;
    const int lo = g.nz % 2 ? hi : hi - 1;
    for (int j = 0; j < g.ny; ++j) w[j] = 0.5 * (std::norm(f(lo, j)) + std::norm(f(hi, j)));
    return w;
}

RVec density_z_marginal(const ComplexField2D& f) {
    const Grid2D& g = f.grid();
    RVec w(g.nz, 0.0);
    for (int i = 0; i < g.nz; ++i) {
        for (int j = 0; j < g.ny; ++j) w[i] += std::norm(f(i, j));
        w[i] *= g.dy();
    }
    return w;
}

RVec density_z_center(const ComplexField2D& f) {
    const Grid2D& g = f.grid();
    RVec w(g.nz);
    const int hi = g.ny / 2;
    const int lo = g.ny % 2 ? hi : hi - 1;
    for (int i = 0; i < g.nz; ++i) w[i] = 0.5 * (std::norm(f(i, lo)) + std::norm(f(i, hi)));
    return w;
}

double expectation_y_at_center(const ComplexField2D& f) {
    return weighted_mean(f.grid().y_axis(), density_y_center(f));
}

PeakReport detect_split(const RVec& d) {
    PeakReport r;
    const int n = static_cast<int>(d.size());
    if (n < 3) return r;
    const double top = *std::max_element(d.begin(), d.end());
    if (!(top > 0.0)) throw ZeroNormError("profile has no positive sample");
    for (int i = 0; i < n; ++i) {
        const bool left = i == 0 || d[i] > d[i - 1];
        const bool right = i == n - 1 || d[i] >= d[i + 1];
        if (left && right && d[i] >= 0.2 * top) r.peaks.push_back(i);
    }
    for (std::size_t k = 0; k + 1 < r.peaks.size(); ++k) {
        const int a = r.peaks[k], b = r.peaks[k + 1];
        const double valley = *std::min_element(d.begin() + a, d.begin() + b + 1);
        if (valley <= 0.8 * std::min(d[a], d[b])) r.split = true;
    }
    return r;
}

double half_width(const RVec& z, const RVec& d) {
    if (z.size() != d.size() || z.size() < 3) throw ValidationError("profile too short");
    if (detect_split(d).split) throw MultimodalProfileError("profile has separated maxima");
    const auto top_it = std::max_element(d.begin(), d.end());
    const int top = static_cast<int>(top_it - d.begin());
    const double floor = 1e-3 * *top_it;
    int lo = top, hi = top;
    while (lo > 0 && d[lo - 1] >= floor) --lo;
    while (hi + 1 < static_cast<int>(d.size()) && d[hi + 1] >= floor) ++hi;
    if (hi - lo < 2) throw DegenerateSeriesError("fewer than three samples above the fit floor");
    Eigen::MatrixXd a(hi - lo + 1, 3);
    Eigen::VectorXd b(hi - lo + 1);
    const double z0 = z[top];
    for (int i = lo; i <= hi; ++i) {
        const double x = z[i] - z0;
        a(i - lo, 0) = 1.0;
        a(i - lo, 1) = x;
        a(i - lo, 2) = x * x;
        b(i - lo) = std::log(d[i]);
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    if (!(c(2) < 0.0)) throw DegenerateSeriesError("log-density is not concave");
    return 1.0 / std::sqrt(-c(2));
}

FitResult fit_damped_cosine(const TimeSeries& s) {
    check_series(s);
    const std::size_t n = s.times.size();
    if (n < 20) throw ValidationError("damped-cosine fit needs at least 20 samples");
    const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
    const double span = *mx - *mn;
    if (!(span > 1e-14 * std::max(1.0, std::abs(*mx)))) throw DegenerateSeriesError("constant series");

    RVec tau(n);  // ms
    for (std::size_t i = 0; i < n; ++i) tau[i] = (s.times[i] - s.times[0]) * 1e-3;
    const RVec& y = s.values;
    const double T = tau.back();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;

    // Dominant angular frequency of the mean-removed series.
    const double dtau = T / (n - 1);
    const double wmax = pi / dtau;
    const int nw = 2000;
    double f_seed = 0.0, best_power = -1.0;
    for (int k = 1; k <= nw; ++k) {
        const double w = wmax * k / nw;
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            re += (y[i] - mean) * std::cos(w * tau[i]);
            im -= (y[i] - mean) * std::sin(w * tau[i]);
        }
        const double pw = re * re + im * im;
        if (pw > best_power) {
            best_power = pw;
            f_seed = w;
        }
    }

    // Envelope decay from the extrema of |y - mean|.
    RVec et, el;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double a = std::abs(y[i] - mean);
        if (a > 0.0 && a >= std::abs(y[i - 1] - mean) && a >= std::abs(y[i + 1] - mean)) {
            et.push_back(tau[i]);
            el.push_back(std::log(a));
        }
    }
    if (std::abs(y[0] - mean) > 0.0) {
        et.insert(et.begin(), tau[0]);
        el.insert(el.begin(), std::log(std::abs(y[0] - mean)));
    }
    double kappa_seed = 1.0 / T;
    if (et.size() >= 2) kappa_seed = std::max(0.0, -linear_fit(et.data(), el.data(), et.size()).slope);

    // Coarse variable-projection scan.
    RVec fs{0.0}, ks{0.0, kappa_seed};
    for (int k = 0; k < 40; ++k) fs.push_back(std::max(f_seed, 2.0 * pi / T) * (0.1 + 2.4 * k / 39.0));
    for (int k = 0; k < 30; ++k) ks.push_back(0.01 / T * std::pow(3000.0, k / 29.0));
    double best_sse = std::numeric_limits<double>::infinity();
    Eigen::Vector4d th;  // A, kappa, f, c
    for (double f : fs)
        for (double kap : ks) {
            const Projection pr = project(tau, y, kap, f);
            if (pr.sse < best_sse) {
                best_sse = pr.sse;
                th << pr.a, kap, f, pr.c;
            }
        }

    // Levenberg-Marquardt refinement with kappa kept non-negative.
    auto residuals = [&](const Eigen::Vector4d& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::exp(-p(1) * tau[i]);
            const double c = std::cos(p(2) * tau[i]), sn = std::sin(p(2) * tau[i]);
            r(i) = p(0) * e * c + p(3) - y[i];
            if (J) {
                (*J)(i, 0) = e * c;
                (*J)(i, 1) = -tau[i] * p(0) * e * c;
                (*J)(i, 2) = -tau[i] * p(0) * e * sn;
                (*J)(i, 3) = 1.0;
            }
        }
    };
    Eigen::VectorXd r(n), rn(n);
    Eigen::MatrixXd J(n, 4);
    residuals(th, r, &J);
    double sse = r.squaredNorm();
    double lambda = 1e-3;
    bool converged = false;
    for (int it = 0; it < 500; ++it) {
        const Eigen::Matrix4d jtj = J.transpose() * J;
        const Eigen::Vector4d g = J.transpose() * r;
        Eigen::Matrix4d a = jtj;
        for (int k = 0; k < 4; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-30);
        Eigen::Vector4d step = a.ldlt().solve(-g);
        Eigen::Vector4d trial = th + step;
        trial(1) = std::max(trial(1), 0.0);
        residuals(trial, rn, nullptr);
        const double sse_new = rn.squaredNorm();
        if (std::isfinite(sse_new) && sse_new <= sse) {
            const double rel = (sse - sse_new) / std::max(sse, 1e-300);
            const double move = (trial - th).norm() / std::max(th.norm(), 1e-300);
            th = trial;
            residuals(th, r, &J);
            sse = sse_new;
            lambda = std::max(lambda / 3.0, 1e-12);
            if (rel < 1e-14 || move < 1e-12) {
                converged = true;
                break;
            }
        } else {
            lambda *= 4.0;
            if (lambda > 1e12) {
                converged = true;
                break;
            }
        }
    }

    FitResult out;
    out.amplitude = th(0);
    out.kappa = th(1);
    out.f = std::abs(th(2));
    out.offset = th(3);
    out.rms_residual = std::sqrt(sse / n);
    out.converged = converged && std::isfinite(out.rms_residual) && std::isfinite(out.f);
    return out;
}

DecayFit log_decay_rate(const RVec& t, const RVec& lv) {
    if (t.size() != lv.size() || t.size() < 4) throw ValidationError("decay fit needs at least 4 samples");
    const std::size_t start = t.size() / 2;
    const std::size_t m = t.size() - start;
    const LineFit lf = linear_fit(t.data() + start, lv.data() + start, m);
    DecayFit d{-lf.slope * 1e3, false};
    for (std::size_t i = start + 1; i < t.size(); ++i)
        if (lv[i] > lv[i - 1]) d.non_monotonic_tail = true;
    return d;
}

DecayFit norm_decay_rate(const TimeSeries& s) {
    check_series(s);
    RVec lv(s.values.size());
    for (std::size_t i = 0; i < lv.size(); ++i) {
        if (!(s.values[i] > 0.0)) throw ValidationError("norm series must be positive");
        lv[i] = std::log(s.values[i]);
    }
    return log_decay_rate(s.times, lv);
}

int count_zero_crossings(const RVec& v, double hysteresis) {
    double top = 0.0;
    for (double x : v) top = std::max(top, std::abs(x));
    const double h = hysteresis * top;
    int state = 0, count = 0;
    for (double x : v) {
        int s = state;
        if (x > h) s = 1;
        else if (x < -h) s = -1;
        if (state != 0 && s != state) ++count;
        state = s;
    }
    return count;
}

}  // namespace imt
