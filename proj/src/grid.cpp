#include "imt/grid.hpp"

#include <cmath>

#include "imt/error.hpp"

namespace imt {

Grid2D Grid2D::from_params(const ParamSet& p) {
    return Grid2D(p.grid.nz, p.grid.ny, z_half_extent(p), 0.5 * p.medium_length);
}

RVec cell_axis(int n, double half) {
    RVec x(n);
    const double h = 2.0 * half / n;
    for (int i = 0; i < n; ++i) x[i] = -half + (i + 0.5) * h;
    return x;
}

RVec Grid2D::z_axis() const { return cell_axis(nz, z_half); }
RVec Grid2D::y_axis() const { return cell_axis(ny, y_half); }

double ComplexField2D::norm2() const {
    double s = 0.0;
    for (const cplx& v : data_) s += std::norm(v);
    return s * grid_.dz() * grid_.dy();
}

double ComplexField2D::norm() const { return std::sqrt(norm2()); }

ComplexField2D& ComplexField2D::operator*=(cplx s) {
    for (cplx& v : data_) v *= s;
    return *this;
}

ComplexField2D& ComplexField2D::operator+=(const ComplexField2D& o) {
    if (!(o.grid_ == grid_)) throw DomainError("field grids differ");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

ComplexField2D& ComplexField2D::operator-=(const ComplexField2D& o) {
    if (!(o.grid_ == grid_)) throw DomainError("field grids differ");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

CVec ComplexField2D::row_z(int j) const {
    CVec r(grid_.nz);
    for (int i = 0; i < grid_.nz; ++i) r[i] = (*this)(i, j);
    return r;
}

CVec ComplexField2D::column_y(int i) const {
    return CVec(data_.begin() + grid_.index(i, 0), data_.begin() + grid_.index(i, 0) + grid_.ny);
}

bool ComplexField2D::all_finite() const {
    for (const cplx& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double overlap(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw DomainError("overlap of vectors with different sizes");
    cplx ip = 0.0;
    double na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ip += std::conj(a[k]) * b[k];
        na += std::norm(a[k]);
        nb += std::norm(b[k]);
    }
    if (na == 0.0 || nb == 0.0) throw ZeroNormError("overlap with a zero vector");
    return std::abs(ip) / std::sqrt(na * nb);
}

double overlap(const ComplexField2D& a, const ComplexField2D& b) {
    if (!(a.grid() == b.grid())) throw DomainError("overlap of fields on different grids");
    return overlap(a.data(), b.data());
}

}  // namespace imt
