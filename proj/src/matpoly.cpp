#include "sisstab/matpoly.hpp"

#include <string>

namespace sisstab {

MatTrigPoly::MatTrigPoly(int rows, int cols, int dims)
    : rows_(rows), cols_(cols), dims_(dims),
      entries_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), TrigPoly(dims)) {
    if (rows < 1 || cols < 1) throw ShapeError("matrix dimensions must be positive");
}

MatTrigPoly MatTrigPoly::identity(int n, int dims) {
    MatTrigPoly m(n, n, dims);
    for (int i = 0; i < n; ++i) m(i, i) = TrigPoly::constant(dims, CRational(1));
    return m;
}

MatTrigPoly MatTrigPoly::from_constants(int rows, int cols, int dims, std::span<const Rational> values) {
    if (values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw ShapeError("constant matrix needs " + std::to_string(rows * cols) + " values");
    MatTrigPoly m(rows, cols, dims);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m(r, c) = TrigPoly::constant(dims, CRational(values[static_cast<std::size_t>(r * cols + c)]));
    return m;
}

MatTrigPoly MatTrigPoly::transpose() const {
    MatTrigPoly t(cols_, rows_, dims_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

MatTrigPoly& MatTrigPoly::operator+=(const MatTrigPoly& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix sum shape mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
}

MatTrigPoly& MatTrigPoly::operator-=(const MatTrigPoly& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix difference shape mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
}

MatTrigPoly operator-(const MatTrigPoly& a) {
    MatTrigPoly out(a);
    for (auto& e : out.entries_) e = -e;
    return out;
}

MatTrigPoly operator*(const MatTrigPoly& a, const MatTrigPoly& b) {
    if (a.cols_ != b.rows_) throw ShapeError("matrix product shape mismatch");
    if (a.dims_ != b.dims_) throw DimensionMismatch("matrix product across different tori");
    MatTrigPoly out(a.rows_, b.cols_, a.dims_);
    for (int i = 0; i < a.rows_; ++i)
        for (int j = 0; j < b.cols_; ++j) {
            TrigPoly acc(a.dims_);
            for (int k = 0; k < a.cols_; ++k) {
                if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
                acc += a(i, k) * b(k, j);
            }
            out(i, j) = std::move(acc);
        }
    return out;
}

MatTrigPoly operator*(const TrigPoly& s, const MatTrigPoly& a) {
    MatTrigPoly out(a);
    for (auto& e : out.entries_) e = s * e;
    return out;
}

TrigPoly det(const MatTrigPoly& m, int size_limit) {
    if (!m.is_square()) throw ShapeError("determinant of a non-square matrix");
    if (m.rows() > size_limit)
        throw SizeLimitExceeded("symbolic determinant of size " + std::to_string(m.rows()) + " exceeds limit " +
                                std::to_string(size_limit));
    const int n = m.rows();
    std::vector<TrigPoly> entries;
    entries.reserve(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) entries.push_back(m(r, c));
    return subset_determinant(entries, n, TrigPoly(m.dims()), TrigPoly::constant(m.dims(), CRational(1)));
}

MatTrigPoly adjugate(const MatTrigPoly& m, int size_limit) {
    if (!m.is_square()) throw ShapeError("adjugate of a non-square matrix");
    const int n = m.rows();
    MatTrigPoly adj(n, n, m.dims());
    if (n == 1) {
        adj(0, 0) = TrigPoly::constant(m.dims(), CRational(1));
        return adj;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            MatTrigPoly minor(n - 1, n - 1, m.dims());
            for (int r = 0, rr = 0; r < n; ++r) {
                if (r == i) continue;
                for (int c = 0, cc = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor(rr, cc++) = m(r, c);
                }
                ++rr;
            }
            TrigPoly cof = det(minor, size_limit);
            adj(j, i) = ((i + j) % 2) ? -cof : cof;
        }
    }
    return adj;
}

MatTrigPoly kron(const MatTrigPoly& a, const MatTrigPoly& b) {
    if (a.dims() != b.dims()) throw DimensionMismatch("Kronecker product across different tori");
    const int p = b.rows();
    const int q = b.cols();
    MatTrigPoly out(a.rows() * p, a.cols() * q, a.dims());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (a(i, j).is_zero()) continue;
            for (int k = 0; k < p; ++k)
                for (int l = 0; l < q; ++l) {
                    if (b(k, l).is_zero()) continue;
                    out(i * p + k, j * q + l) = a(i, j) * b(k, l);
                }
        }
    return out;
}

MatTrigPoly circle_conj(const MatTrigPoly& m) {
    MatTrigPoly out(m.rows(), m.cols(), m.dims());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out(r, c) = circle_conj(m(r, c));
    return out;
}

Eigen::MatrixXcd evaluate(const MatTrigPoly& m, std::span<const std::complex<double>> z) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out(r, c) = evaluate(m(r, c), z);
    return out;
}

TrigPoly exact_div(const TrigPoly& num, const TrigPoly& den) {
    if (num.dims() != den.dims()) throw DimensionMismatch("exact division across different tori");
    if (den.is_zero()) throw ZeroDivisor("division by the zero polynomial");
    const int L = num.dims();
    TrigPoly quotient(L);
    if (num.is_zero()) return quotient;

    // Newton polytopes add under multiplication, so the quotient's exponents
    // are confined to this box.
    DegreeTuple qmin = num.min_exponents();
    DegreeTuple qmax = num.max_exponents();
    const DegreeTuple dmin = den.min_exponents();
    const DegreeTuple dmax = den.max_exponents();
    for (int i = 0; i < L; ++i) {
        qmin[i] -= dmin[i];
        qmax[i] -= dmax[i];
        if (qmin[i] > qmax[i]) throw NotDivisible("exponent range of the divisor exceeds the dividend's");
    }

    const auto& [lead_deg, lead_coeff] = *den.terms().rbegin();
    TrigPoly rest = num;
    while (!rest.is_zero()) {
        const auto& [rdeg, rcoeff] = *rest.terms().rbegin();
        DegreeTuple qdeg(static_cast<std::size_t>(L));
        for (int i = 0; i < L; ++i) {
            qdeg[i] = rdeg[i] - lead_deg[i];
            if (qdeg[i] < qmin[i] || qdeg[i] > qmax[i])
                throw NotDivisible("remainder term falls outside the admissible quotient support");
        }
        TrigPoly step = TrigPoly::monomial(L, qdeg, rcoeff / lead_coeff);
        rest -= step * den;
        quotient += step;
    }
    return quotient;
}

}  // namespace sisstab
