#include "sisstab/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace sisstab {

namespace {

Rational parse_decimal(std::string_view s, std::string_view whole) {
    if (s.empty()) throw std::invalid_argument("empty number in '" + std::string(whole) + "'");
    bool neg = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false;
    bool any_digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_dot) ++frac_digits;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if (c == '_') {
            continue;
        } else {
            break;
        }
    }
    if (!any_digit) throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
    long exponent = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E')
            throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
        ++i;
        std::string exp_text(s.substr(i));
        if (exp_text.empty()) throw std::invalid_argument("bad exponent in '" + std::string(whole) + "'");
        std::size_t used = 0;
        try {
            exponent = std::stol(exp_text, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad exponent in '" + std::string(whole) + "'");
        }
        if (used != exp_text.size())
            throw std::invalid_argument("bad exponent in '" + std::string(whole) + "'");
    }
    mpz_class num(digits, 10);
    long shift = exponent - frac_digits;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
    Rational out;
    if (shift >= 0) {
        out = Rational(num * scale);
    } else {
        out = Rational(num, scale);
        out.canonicalize();
    }
    return neg ? Rational(-out) : out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = trim(text);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_decimal(s, text);
    Rational num = parse_decimal(trim(s.substr(0, slash)), text);
    Rational den = parse_decimal(trim(s.substr(slash + 1)), text);
    if (sgn(den) == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return num / den;
}

std::string to_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

CRational& CRational::operator*=(const CRational& o) {
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

CRational& CRational::operator/=(const CRational& o) {
    Rational n2 = o.re * o.re + o.im * o.im;
    if (sgn(n2) == 0) throw std::domain_error("division by zero complex rational");
    Rational r = (re * o.re + im * o.im) / n2;
    Rational i = (im * o.re - re * o.im) / n2;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

Rational rational_from_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value cannot be rationalized");
    Rational out;
    mpq_set_d(out.get_mpq_t(), v);
    return out;
}

}  // namespace sisstab
