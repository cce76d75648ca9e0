#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sisstab/errors.hpp"
#include "sisstab/trigpoly.hpp"

namespace sisstab {

/// Largest matrix the symbolic determinant accepts by default.
inline constexpr int kDefaultDetSizeLimit = 16;

/// Dense row-major matrix with TrigPoly entries sharing one ambient dimension.
class MatTrigPoly {
public:
    MatTrigPoly(int rows, int cols, int dims);

    static MatTrigPoly identity(int n, int dims);
    /// Constant matrix from exact rationals (row-major, rows*cols values).
    static MatTrigPoly from_constants(int rows, int cols, int dims, std::span<const Rational> values);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int dims() const { return dims_; }
    bool is_square() const { return rows_ == cols_; }

    const TrigPoly& operator()(int r, int c) const { return entries_[index(r, c)]; }
    TrigPoly& operator()(int r, int c) { return entries_[index(r, c)]; }

    MatTrigPoly transpose() const;

    MatTrigPoly& operator+=(const MatTrigPoly& o);
    MatTrigPoly& operator-=(const MatTrigPoly& o);
    friend MatTrigPoly operator+(MatTrigPoly a, const MatTrigPoly& b) { return a += b; }
    friend MatTrigPoly operator-(MatTrigPoly a, const MatTrigPoly& b) { return a -= b; }
    friend MatTrigPoly operator-(const MatTrigPoly& a);
    friend MatTrigPoly operator*(const MatTrigPoly& a, const MatTrigPoly& b);
    friend MatTrigPoly operator*(const TrigPoly& s, const MatTrigPoly& a);
    friend bool operator==(const MatTrigPoly& a, const MatTrigPoly& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.dims_ == b.dims_ && a.entries_ == b.entries_;
    }
    friend bool operator!=(const MatTrigPoly& a, const MatTrigPoly& b) { return !(a == b); }

private:
    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
    }

    int rows_;
    int cols_;
    int dims_;
    std::vector<TrigPoly> entries_;
};

/// Exact determinant by Laplace expansion with every minor memoized (one
/// minor per column subset). Throws SizeLimitExceeded above size_limit.
TrigPoly det(const MatTrigPoly& m, int size_limit = kDefaultDetSizeLimit);

/// Signed cofactor transpose, so that m * adjugate(m) = det(m) * I.
MatTrigPoly adjugate(const MatTrigPoly& m, int size_limit = kDefaultDetSizeLimit);

/// Entry (i*p + k, j*q + l) = a(i,j) * b(k,l) for b of size p x q.
MatTrigPoly kron(const MatTrigPoly& a, const MatTrigPoly& b);

MatTrigPoly circle_conj(const MatTrigPoly& m);

Eigen::MatrixXcd evaluate(const MatTrigPoly& m, std::span<const std::complex<double>> z);

/// Exact Laurent division: Q with Q * den = num. Throws ZeroDivisor for a zero
/// divisor and NotDivisible when no polynomial quotient exists.
TrigPoly exact_div(const TrigPoly& num, const TrigPoly& den);

/// Memoized-minor determinant over any commutative ring with +, -, *.
/// entries are row-major n x n.
template <class Ring>
Ring subset_determinant(const std::vector<Ring>& entries, int n, const Ring& zero, const Ring& one) {
    if (n == 0) return one;
    const std::size_t masks = std::size_t{1} << n;
    // minors[mask]: determinant of rows [0, popcount(mask)) x columns in mask
    std::vector<Ring> minors(masks, zero);
    std::vector<bool> present(masks, false);
    minors[0] = one;
    present[0] = true;
    for (std::size_t mask = 0; mask < masks; ++mask) {
        if (!present[mask]) continue;
        const int row = __builtin_popcountll(mask);
        if (row == n) continue;
        for (int col = 0; col < n; ++col) {
            if (mask & (std::size_t{1} << col)) continue;
            const Ring& a = entries[static_cast<std::size_t>(row) * static_cast<std::size_t>(n) +
                                    static_cast<std::size_t>(col)];
            // sign from the number of already-used columns to the right of col
            const int above = __builtin_popcountll(mask >> (col + 1));
            const std::size_t next = mask | (std::size_t{1} << col);
            Ring term = a * minors[mask];
            if (above % 2) minors[next] = minors[next] - term;
            else minors[next] = minors[next] + term;
            present[next] = true;
        }
        if (mask != 0) minors[mask] = zero;
    }
    return minors[masks - 1];
}

}  // namespace sisstab
