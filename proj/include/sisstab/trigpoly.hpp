#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sisstab/rational.hpp"

namespace sisstab {

/// Exponent vector of a Laurent monomial z_1^{d_1} ... z_L^{d_L}.
using DegreeTuple = std::vector<int>;

/// Sparse Laurent polynomial in L variables restricted to the unit torus,
/// with exact complex-rational coefficients.
///
/// The term map never stores a zero coefficient, so two polynomials are equal
/// iff their maps are equal. Values are immutable once built; every operation
/// returns a fresh polynomial.
class TrigPoly {
public:
    using Terms = std::map<DegreeTuple, CRational>;

    explicit TrigPoly(int dims = 1);

    static TrigPoly constant(int dims, const CRational& c);
    static TrigPoly monomial(int dims, DegreeTuple d, const CRational& c = CRational(1));
    /// z_var^power, var is 0-based.
    static TrigPoly variable(int dims, int var, int power = 1);
    /// Builds from arbitrary terms (zeros dropped). With require_hermitian the
    /// symmetry c(-d) = conj(c(d)) is checked and a violation throws.
    static TrigPoly from_terms(int dims, const Terms& terms, bool require_hermitian = false);

    int dims() const { return dims_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    CRational coeff(const DegreeTuple& d) const;
    CRational constant_term() const;

    /// Per-variable max |d_i| over stored terms (all zeros for constants).
    DegreeTuple degree() const;
    /// Per-variable min and max exponent over stored terms.
    DegreeTuple min_exponents() const;
    DegreeTuple max_exponents() const;

    bool is_hermitian() const;
    bool has_real_coefficients() const;

    TrigPoly& operator+=(const TrigPoly& o);
    TrigPoly& operator-=(const TrigPoly& o);
    TrigPoly& operator*=(const CRational& c);

    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
    friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b);
    friend TrigPoly operator*(TrigPoly a, const CRational& c) { return a *= c; }
    friend TrigPoly operator*(const CRational& c, TrigPoly a) { return a *= c; }
    friend TrigPoly operator-(const TrigPoly& a);
    friend bool operator==(const TrigPoly& a, const TrigPoly& b) {
        return a.dims_ == b.dims_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const TrigPoly& a, const TrigPoly& b) { return !(a == b); }

private:
    void add_term(const DegreeTuple& d, const CRational& c);

    int dims_;
    Terms terms_;
};

TrigPoly add(const TrigPoly& p, const TrigPoly& q);
TrigPoly mul(const TrigPoly& p, const TrigPoly& q);

/// Coefficient conjugation plus degree negation; equals pointwise complex
/// conjugation on the torus.
TrigPoly circle_conj(const TrigPoly& p);

/// Double-precision evaluation. Throws OffCircle if some |z_i| differs from 1
/// by more than 1e-12.
std::complex<double> evaluate(const TrigPoly& p, std::span<const std::complex<double>> z);

/// True iff p has no non-constant term and its constant term is real and <= 0.
bool is_nonpositive_constant(const TrigPoly& p);

/// One term per line, "re/im@d1,...,dL" with re and im written as p/q, terms
/// in lexicographic degree order. The zero polynomial serializes to "".
std::string to_text(const TrigPoly& p);
TrigPoly trigpoly_from_text(const std::string& text, int dims);

/// Human-readable form such as "0.25*z1^-1*z2^-1 + 20 + 0.25*z1*z2".
std::string pretty(const TrigPoly& p);

/// Floating-point copy of a TrigPoly for repeated evaluation on grids.
/// No circle check is performed.
class NumericPoly {
public:
    NumericPoly() = default;
    explicit NumericPoly(const TrigPoly& p);

    std::complex<double> operator()(std::span<const std::complex<double>> z) const;
    /// Real part of the value at the point with angles theta (radians).
    double real_at_angles(std::span<const double> theta) const;
    int dims() const { return dims_; }

private:
    int dims_ = 0;
    std::vector<int> exps_;  // row-major, dims_ per term
    std::vector<std::complex<double>> coeffs_;
};

}  // namespace sisstab
