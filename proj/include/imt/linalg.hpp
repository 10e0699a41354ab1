#pragma once

#include <vector>

#include "imt/grid.hpp"

namespace imt {

// Tridiagonal complex matrix: row i is lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1].
// lower[0] and upper[n-1] are ignored.
struct Tridiag {
    CVec lower;
    CVec diag;
    CVec upper;

    Tridiag() = default;
    explicit Tridiag(std::size_t n) : lower(n), diag(n), upper(n) {}
    std::size_t size() const { return diag.size(); }
    CVec apply(const CVec& x) const;
    void apply(const cplx* x, cplx* y) const;
};

/// LU factorisation with partial pivoting (LAPACK gttrf).
class TridiagLU {
public:
    TridiagLU() = default;
    explicit TridiagLU(const Tridiag& t);
    bool singular() const { return singular_; }
    void solve(cplx* b) const;  ///< in place
    void solve(CVec& b) const { solve(b.data()); }
    std::size_t size() const { return d_.size(); }

private:
    CVec dl_, d_, du_, du2_;
    std::vector<int> ipiv_;
    bool singular_ = false;
};

/// General band matrix LU (LAPACK gbtrf), n x n with kl sub- and ku super-diagonals.
class BandLU {
public:
    BandLU() = default;
    BandLU(int n, int kl, int ku);
    /// Entry (r, c) of the unfactored matrix; |r - c| must lie inside the band.
    cplx& at(int r, int c) { return ab_[static_cast<std::size_t>(c) * ldab_ + (kl_ + ku_ + r - c)]; }
    void factor();
    void solve(cplx* b) const;

private:
    int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
    CVec ab_;
    std::vector<int> ipiv_;
    bool factored_ = false;
};

}  // namespace imt
