#include "sisstab/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sisstab/errors.hpp"

namespace sisstab {

namespace {

void check_dims(const TrigPoly& p, const TrigPoly& q) {
    if (p.dims() != q.dims())
        throw DimensionMismatch("trigonometric polynomials live on T^" + std::to_string(p.dims()) +
                                " and T^" + std::to_string(q.dims()));
}

DegreeTuple negate(const DegreeTuple& d) {
    DegreeTuple out(d.size());
    std::transform(d.begin(), d.end(), out.begin(), [](int v) { return -v; });
    return out;
}

std::string rational_short(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    // dyadic and other terminating fractions print as decimals
    mpz_class den = q.get_den();
    int twos = 0;
    int fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1) return to_string(q);
    int digits = std::max(twos, fives);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpz_class scaled = q.get_num() * scale / q.get_den();
    bool neg = scaled < 0;
    std::string s = mpz_class(abs(scaled)).get_str();
    if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    return (neg ? "-" : "") + s;
}

}  // namespace

TrigPoly::TrigPoly(int dims) : dims_(dims) {
    if (dims < 1) throw DimensionMismatch("trigonometric polynomial needs at least one variable");
}

TrigPoly TrigPoly::constant(int dims, const CRational& c) {
    return monomial(dims, DegreeTuple(static_cast<std::size_t>(dims), 0), c);
}

TrigPoly TrigPoly::monomial(int dims, DegreeTuple d, const CRational& c) {
    TrigPoly p(dims);
    if (static_cast<int>(d.size()) != dims)
        throw DimensionMismatch("degree tuple length " + std::to_string(d.size()) + " != " + std::to_string(dims));
    if (!c.is_zero()) p.add_term(d, c);
    return p;
}

TrigPoly TrigPoly::variable(int dims, int var, int power) {
    if (var < 0 || var >= dims) throw DimensionMismatch("variable index out of range");
    DegreeTuple d(static_cast<std::size_t>(dims), 0);
    d[static_cast<std::size_t>(var)] = power;
    return monomial(dims, std::move(d));
}

TrigPoly TrigPoly::from_terms(int dims, const Terms& terms, bool require_hermitian) {
    TrigPoly p(dims);
    for (const auto& [d, c] : terms) {
        if (static_cast<int>(d.size()) != dims) throw DimensionMismatch("degree tuple length mismatch");
        p.add_term(d, c);
    }
    if (require_hermitian && !p.is_hermitian())
        throw Error("coefficients violate the Hermitian symmetry c(-d) = conj(c(d))");
    return p;
}

void TrigPoly::add_term(const DegreeTuple& d, const CRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(d, c);
    if (inserted) {
        // mpq_class(num, den) does not reduce
        it->second.re.canonicalize();
        it->second.im.canonicalize();
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

bool TrigPoly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const auto& d = terms_.begin()->first;
    return std::all_of(d.begin(), d.end(), [](int v) { return v == 0; });
}

CRational TrigPoly::coeff(const DegreeTuple& d) const {
    auto it = terms_.find(d);
    return it == terms_.end() ? CRational() : it->second;
}

CRational TrigPoly::constant_term() const {
    return coeff(DegreeTuple(static_cast<std::size_t>(dims_), 0));
}

DegreeTuple TrigPoly::degree() const {
    DegreeTuple n(static_cast<std::size_t>(dims_), 0);
    for (const auto& [d, c] : terms_)
        for (std::size_t i = 0; i < d.size(); ++i) n[i] = std::max(n[i], std::abs(d[i]));
    return n;
}

DegreeTuple TrigPoly::min_exponents() const {
    DegreeTuple n(static_cast<std::size_t>(dims_), 0);
    bool first = true;
    for (const auto& [d, c] : terms_) {
        for (std::size_t i = 0; i < d.size(); ++i) n[i] = first ? d[i] : std::min(n[i], d[i]);
        first = false;
    }
    return n;
}

DegreeTuple TrigPoly::max_exponents() const {
    DegreeTuple n(static_cast<std::size_t>(dims_), 0);
    bool first = true;
    for (const auto& [d, c] : terms_) {
        for (std::size_t i = 0; i < d.size(); ++i) n[i] = first ? d[i] : std::max(n[i], d[i]);
        first = false;
    }
    return n;
}

bool TrigPoly::is_hermitian() const {
    for (const auto& [d, c] : terms_) {
        auto it = terms_.find(negate(d));
        if (it == terms_.end() || it->second != c.conj()) return false;
    }
    return true;
}

bool TrigPoly::has_real_coefficients() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_real(); });
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
    check_dims(*this, o);
    for (const auto& [d, c] : o.terms_) add_term(d, c);
    return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& o) {
    check_dims(*this, o);
    for (const auto& [d, c] : o.terms_) add_term(d, -c);
    return *this;
}

TrigPoly& TrigPoly::operator*=(const CRational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [d, v] : terms_) v *= c;
    return *this;
}

TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    check_dims(a, b);
    TrigPoly out(a.dims());
    DegreeTuple d(static_cast<std::size_t>(a.dims()));
    for (const auto& [da, ca] : a.terms_) {
        for (const auto& [db, cb] : b.terms_) {
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = da[i] + db[i];
            out.add_term(d, ca * cb);
        }
    }
    return out;
}

TrigPoly operator-(const TrigPoly& a) {
    TrigPoly out(a);
    for (auto& [d, c] : out.terms_) c = -c;
    return out;
}

TrigPoly add(const TrigPoly& p, const TrigPoly& q) { return p + q; }
TrigPoly mul(const TrigPoly& p, const TrigPoly& q) { return p * q; }

TrigPoly circle_conj(const TrigPoly& p) {
    TrigPoly::Terms t;
    for (const auto& [d, c] : p.terms()) t.emplace(negate(d), c.conj());
    return TrigPoly::from_terms(p.dims(), t);
}

std::complex<double> evaluate(const TrigPoly& p, std::span<const std::complex<double>> z) {
    if (static_cast<int>(z.size()) != p.dims())
        throw DimensionMismatch("evaluation point has " + std::to_string(z.size()) + " coordinates, expected " +
                                std::to_string(p.dims()));
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (std::abs(std::abs(z[i]) - 1.0) > 1e-12)
            throw OffCircle("coordinate " + std::to_string(i + 1) + " is not on the unit circle");
    }
    return NumericPoly(p)(z);
}

bool is_nonpositive_constant(const TrigPoly& p) {
    if (!p.is_constant()) return false;
    CRational c = p.constant_term();
    return c.is_real() && sgn(c.re) <= 0;
}

std::string to_text(const TrigPoly& p) {
    std::ostringstream os;
    for (const auto& [d, c] : p.terms()) {
        os << to_string(c.re) << '/' << to_string(c.im) << '@';
        for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
        os << '\n';
    }
    return os.str();
}

TrigPoly trigpoly_from_text(const std::string& text, int dims) {
    TrigPoly::Terms terms;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto at = line.find('@');
        if (at == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": missing '@'");
        std::vector<std::string> parts;
        std::stringstream cs(line.substr(0, at));
        for (std::string part; std::getline(cs, part, '/');) parts.push_back(part);
        if (parts.size() != 4)
            throw ParseError("line " + std::to_string(lineno) + ": coefficient must read p/q/r/s (re/im)");
        CRational c;
        try {
            c = CRational(parse_rational(parts[0] + "/" + parts[1]), parse_rational(parts[2] + "/" + parts[3]));
        } catch (const std::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        DegreeTuple d;
        std::stringstream ds(line.substr(at + 1));
        for (std::string part; std::getline(ds, part, ',');) {
            try {
                std::size_t used = 0;
                d.push_back(std::stoi(part, &used));
                if (used != part.size()) throw std::invalid_argument(part);
            } catch (const std::exception&) {
                throw ParseError("line " + std::to_string(lineno) + ": bad exponent '" + part + "'");
            }
        }
        if (static_cast<int>(d.size()) != dims)
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(dims) + " exponents");
        if (terms.count(d)) throw ParseError("line " + std::to_string(lineno) + ": duplicate monomial");
        terms.emplace(std::move(d), std::move(c));
    }
    return TrigPoly::from_terms(dims, terms);
}

std::string pretty(const TrigPoly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [d, c] : p.terms()) {
        std::string coef;
        if (c.is_real()) {
            coef = rational_short(c.re);
        } else {
            coef = "(" + rational_short(c.re) + (sgn(c.im) < 0 ? "" : "+") + rational_short(c.im) + "i)";
        }
        bool negative = c.is_real() && sgn(c.re) < 0;
        if (!first) os << (negative ? " - " : " + ");
        else if (negative) os << "-";
        if (negative) coef.erase(0, 1);
        std::string mono;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i] == 0) continue;
            mono += "*z" + std::to_string(i + 1);
            if (d[i] != 1) mono += "^" + std::to_string(d[i]);
        }
        if (mono.empty()) os << coef;
        else if (coef == "1") os << mono.substr(1);
        else os << coef << mono;
        first = false;
    }
    return os.str();
}

NumericPoly::NumericPoly(const TrigPoly& p) : dims_(p.dims()) {
    exps_.reserve(p.size() * static_cast<std::size_t>(dims_));
    coeffs_.reserve(p.size());
    for (const auto& [d, c] : p.terms()) {
        exps_.insert(exps_.end(), d.begin(), d.end());
        coeffs_.push_back(c.to_complex());
    }
}

std::complex<double> NumericPoly::operator()(std::span<const std::complex<double>> z) const {
    std::complex<double> acc = 0.0;
    const std::size_t L = static_cast<std::size_t>(dims_);
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
        std::complex<double> m = coeffs_[t];
        for (std::size_t i = 0; i < L; ++i) {
            int e = exps_[t * L + i];
            if (e == 0) continue;
            // |z| = 1: z^-1 = conj(z)
            std::complex<double> base = e > 0 ? z[i] : std::conj(z[i]);
            m *= std::pow(base, std::abs(e));
        }
        acc += m;
    }
    return acc;
}

double NumericPoly::real_at_angles(std::span<const double> theta) const {
    double acc = 0.0;
    const std::size_t L = static_cast<std::size_t>(dims_);
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
        double phase = 0.0;
        for (std::size_t i = 0; i < L; ++i) phase += exps_[t * L + i] * theta[i];
        acc += coeffs_[t].real() * std::cos(phase) - coeffs_[t].imag() * std::sin(phase);
    }
    return acc;
}

}  // namespace sisstab
