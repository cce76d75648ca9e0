#pragma once

#include <complex>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace sisstab {

using Rational = mpq_class;

/// Parses "3", "-0.25", "1.5e-3" or "7/8" into an exact rational.
/// Decimal input is read digit by digit, so 0.1 becomes exactly 1/10.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form (q > 0, always printed).
std::string to_string(const Rational& q);

/// Exact complex rational re + i*im.
struct CRational {
    Rational re;
    Rational im;

    CRational() = default;
    CRational(Rational r) : re(std::move(r)), im(0) {}
    CRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    CRational(long r) : re(r), im(0) {}
    CRational(int r) : re(r), im(0) {}

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
    CRational conj() const { return {re, -im}; }
    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

    CRational& operator+=(const CRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    CRational& operator-=(const CRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    CRational& operator*=(const CRational& o);
    CRational& operator/=(const CRational& o);

    friend CRational operator+(CRational a, const CRational& b) { return a += b; }
    friend CRational operator-(CRational a, const CRational& b) { return a -= b; }
    friend CRational operator*(CRational a, const CRational& b) { return a *= b; }
    friend CRational operator/(CRational a, const CRational& b) { return a /= b; }
    friend CRational operator-(const CRational& a) { return {-a.re, -a.im}; }
    friend bool operator==(const CRational& a, const CRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const CRational& a, const CRational& b) { return !(a == b); }
};

/// Exact conversion of a finite double (every double is a dyadic rational).
Rational rational_from_double(double v);

}  // namespace sisstab
