#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "imt/linalg.hpp"

#include <sstream>

#include "imt/error.hpp"

namespace imt {

void Tridiag::apply(const cplx* x, cplx* y) const {
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = diag[i] * x[i];
        if (i > 0) s += lower[i] * x[i - 1];
        if (i + 1 < n) s += upper[i] * x[i + 1];
        y[i] = s;
    }
}

CVec Tridiag::apply(const CVec& x) const {
    CVec y(x.size());
    apply(x.data(), y.data());
    return y;
}

TridiagLU::TridiagLU(const Tridiag& t) {
    const lapack_int n = static_cast<lapack_int>(t.size());
    d_ = t.diag;
    dl_.assign(n > 1 ? n - 1 : 1, 0.0);
    du_.assign(n > 1 ? n - 1 : 1, 0.0);
    du2_.assign(n > 2 ? n - 2 : 1, 0.0);
    for (lapack_int i = 0; i + 1 < n; ++i) {
        dl_[i] = t.lower[i + 1];
        du_[i] = t.upper[i];
    }
    ipiv_.assign(n, 0);
    const lapack_int info = LAPACKE_zgttrf(n, dl_.data(), d_.data(), du_.data(), du2_.data(),
                                           ipiv_.data());
    if (info < 0) throw NumericalError("gttrf rejected its arguments");
    singular_ = info > 0;
}

void TridiagLU::solve(cplx* b) const {
    const lapack_int n = static_cast<lapack_int>(d_.size());
    const lapack_int info = LAPACKE_zgttrs(LAPACK_COL_MAJOR, 'N', n, 1, dl_.data(), d_.data(),
                                           du_.data(), du2_.data(), ipiv_.data(), b, n);
    if (info != 0) throw NumericalError("gttrs failed");
}

BandLU::BandLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(n) * (2 * kl + ku + 1), 0.0), ipiv_(n, 0) {}

void BandLU::factor() {
    const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ldab_,
                                           ipiv_.data());
    if (info != 0) {
        std::ostringstream os;
        os << "band factorisation failed, info = " << info;
        throw NumericalError(os.str());
    }
    factored_ = true;
}

void BandLU::solve(cplx* b) const {
    if (!factored_) throw NumericalError("band solve before factorisation");
    const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(),
                                           ldab_, ipiv_.data(), b, n_);
    if (info != 0) throw NumericalError("gbtrs failed");
}

}  // namespace imt
