#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "imt/params.hpp"

namespace imt {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

// Cell-centred tensor grid. z spans [-Z, Z], y spans [-L/2, L/2]; sample i
// sits at the centre of cell i, so the domain walls lie half a cell outside
// the outermost samples.
struct Grid2D {
    int nz = 0;
    int ny = 0;
    double z_half = 0.0;
    double y_half = 0.0;

    Grid2D() = default;
    Grid2D(int nz_, int ny_, double z_half_, double y_half_)
        : nz(nz_), ny(ny_), z_half(z_half_), y_half(y_half_) {}

    static Grid2D from_params(const ParamSet& p);

    double dz() const { return 2.0 * z_half / nz; }
    double dy() const { return 2.0 * y_half / ny; }
    double z(int i) const { return -z_half + (i + 0.5) * dz(); }
    double y(int j) const { return -y_half + (j + 0.5) * dy(); }
    std::size_t size() const { return static_cast<std::size_t>(nz) * ny; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }
    RVec z_axis() const;
    RVec y_axis() const;

    bool operator==(const Grid2D&) const = default;
};

/// Uniform 1D cell-centred axis on [-half, half].
RVec cell_axis(int n, double half);

// Complex scalar on a Grid2D; storage is z-major (y contiguous).
class ComplexField2D {
public:
    ComplexField2D() = default;
    explicit ComplexField2D(const Grid2D& g, cplx fill = 0.0)
        : grid_(g), data_(g.size(), fill) {}

    const Grid2D& grid() const { return grid_; }
    int nz() const { return grid_.nz; }
    int ny() const { return grid_.ny; }

    cplx& operator()(int i, int j) { return data_[grid_.index(i, j)]; }
    const cplx& operator()(int i, int j) const { return data_[grid_.index(i, j)]; }
    CVec& data() { return data_; }
    const CVec& data() const { return data_; }

    /// Integral of |f|^2 over the grid (midpoint rule).
    double norm2() const;
    double norm() const;
    ComplexField2D& operator*=(cplx s);
    ComplexField2D& operator+=(const ComplexField2D& o);
    ComplexField2D& operator-=(const ComplexField2D& o);

    CVec row_z(int j) const;   ///< f(:, j)
    CVec column_y(int i) const;  ///< f(i, :)

    bool all_finite() const;

private:
    Grid2D grid_;
    CVec data_;
};

/// L2 overlap |<a|b>| / (|a||b|) of two fields on the same grid.
double overlap(const ComplexField2D& a, const ComplexField2D& b);
double overlap(const CVec& a, const CVec& b);

}  // namespace imt
