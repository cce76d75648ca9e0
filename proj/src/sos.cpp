#include "sisstab/sos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

#include <json.hpp>

#include "sisstab/errors.hpp"

namespace sisstab {

using nlohmann::json;

std::size_t GramBasisSpec::size() const {
    std::size_t n = 1;
    for (int d : nhat) n *= static_cast<std::size_t>(d + 1);
    return n;
}

DegreeTuple GramBasisSpec::exponents(std::size_t index) const {
    DegreeTuple a(nhat.size());
    for (std::size_t i = 0; i < nhat.size(); ++i) {
        const auto w = static_cast<std::size_t>(nhat[i] + 1);
        a[i] = static_cast<int>(index % w);
        index /= w;
    }
    return a;
}

namespace {

std::vector<DegreeTuple> all_exponents(const GramBasisSpec& basis) {
    std::vector<DegreeTuple> out(basis.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = basis.exponents(i);
    return out;
}

DegreeTuple diff(const DegreeTuple& b, const DegreeTuple& a) {
    DegreeTuple d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i];
    return d;
}

// True for the nonzero degrees whose first nonzero entry is negative; their
// coefficients are conjugates of the mirrored ones for Hermitian polynomials.
bool negative_half(const DegreeTuple& d) {
    for (int v : d)
        if (v != 0) return v < 0;
    return false;
}

bool is_zero_degree(const DegreeTuple& d) {
    return std::all_of(d.begin(), d.end(), [](int v) { return v == 0; });
}

}  // namespace

Eigen::MatrixXd toeplitz_T(const DegreeTuple& d, const DegreeTuple& nhat) {
    if (d.size() != nhat.size()) throw DimensionMismatch("degree and basis dimensions differ");
    for (std::size_t i = 0; i < d.size(); ++i)
        if (std::abs(d[i]) > nhat[i]) throw Error("degree exceeds the Gram basis degree");
    GramBasisSpec basis{nhat};
    const auto ex = all_exponents(basis);
    const auto n = static_cast<Eigen::Index>(ex.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index b = 0; b < n; ++b)
        for (Eigen::Index a = 0; a < n; ++a)
            if (diff(ex[static_cast<std::size_t>(b)], ex[static_cast<std::size_t>(a)]) == d) T(b, a) = 1.0;
    return T;
}

TrigPoly gram_polynomial(const Eigen::MatrixXcd& G, const GramBasisSpec& basis) {
    const auto ex = all_exponents(basis);
    if (G.rows() != static_cast<Eigen::Index>(ex.size()) || G.cols() != G.rows())
        throw ShapeError("Gram matrix size does not match its basis");
    TrigPoly::Terms terms;
    for (std::size_t a = 0; a < ex.size(); ++a) {
        for (std::size_t b = 0; b < ex.size(); ++b) {
            const auto g = G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (g == 0.0) continue;
            terms[diff(ex[b], ex[a])] += CRational(rational_from_double(g.real()), rational_from_double(g.imag()));
        }
    }
    return TrigPoly::from_terms(static_cast<int>(basis.nhat.size()), terms);
}

DomainPoly domain_poly(int dims, int direction, int period) {
    if (direction < 0 || direction >= dims) throw DimensionMismatch("direction index out of range");
    if (period < 1) throw Error("period must be positive");
    const CRational half(Rational(1, 2));
    TrigPoly D = half * TrigPoly::variable(dims, direction, period) +
                 half * TrigPoly::variable(dims, direction, -period) - TrigPoly::constant(dims, CRational(1));
    return {std::move(D), period, direction};
}

std::vector<DomainPoly> build_domain_polys(const std::vector<DirectionSpec>& directions) {
    std::vector<DomainPoly> out;
    const int L = static_cast<int>(directions.size());
    for (int i = 0; i < L; ++i)
        if (directions[static_cast<std::size_t>(i)].kind == DirectionKind::Periodic)
            out.push_back(domain_poly(L, i, directions[static_cast<std::size_t>(i)].period));
    return out;
}

namespace {

// Coefficient functionals of one polynomial identity, indexed by degree.
// Entries are keyed by (block, row, col) so repeated contributions merge.
struct Part {
    std::map<std::tuple<int, int, int>, double> entries;

    void add(int block, int r, int c, double v) {
        if (v == 0.0) return;
        if (r > c) std::swap(r, c);
        entries[{block, r, c}] += v;
    }

    sdp::LinearFunctional functional() const {
        sdp::LinearFunctional f;
        for (const auto& [key, v] : entries) {
            if (v == 0.0) continue;
            f.entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
        }
        return f;
    }
};

struct Identity {
    std::map<DegreeTuple, std::pair<Part, Part>> coeff;  // (real part, imaginary part)
};

// Adds the contribution of multiplier * p^T(z^-1) G p(z) for solver block
// `block` to the identity. In complex mode the Hermitian G is read from a real
// symmetric S = [[S11, S12], [S21, S22]] as G = ((S11 + S22) + i (S21 - S12)) / 2.
void add_block(Identity& id, int block, const GramBasisSpec& basis, const TrigPoly& multiplier, bool complex_mode) {
    const auto ex = all_exponents(basis);
    const int N = static_cast<int>(ex.size());
    for (const auto& [delta, m] : multiplier.terms()) {
        const double mr = m.re.get_d();
        const double mi = m.im.get_d();
        for (int a = 0; a < N; ++a) {
            for (int b = 0; b < N; ++b) {
                DegreeTuple d = diff(ex[static_cast<std::size_t>(b)], ex[static_cast<std::size_t>(a)]);
                for (std::size_t i = 0; i < d.size(); ++i) d[i] += delta[i];
                if (negative_half(d)) continue;
                auto& [re, im] = id.coeff[d];
                if (!complex_mode) {
                    re.add(block, a, b, mr);
                    im.add(block, a, b, mi);
                    continue;
                }
                // Re G_ab = (S(a,b) + S(N+a,N+b))/2, Im G_ab = (S(N+a,b) - S(a,N+b))/2
                re.add(block, a, b, 0.5 * mr);
                re.add(block, N + a, N + b, 0.5 * mr);
                re.add(block, N + a, b, -0.5 * mi);
                re.add(block, a, N + b, 0.5 * mi);
                im.add(block, a, b, 0.5 * mi);
                im.add(block, N + a, N + b, 0.5 * mi);
                im.add(block, N + a, b, 0.5 * mr);
                im.add(block, a, N + b, -0.5 * mr);
            }
        }
    }
}

// Equality constraints "identity(d) + eps [d = 0] = F(d)" over the nonnegative
// half of the degree set.
void emit_constraints(sdp::SdpProblem& prob, const Identity& id, const TrigPoly& F, bool complex_mode) {
    for (const auto& [d, f] : F.terms())
        if (!negative_half(d) && !id.coeff.count(d))
            throw InfeasibleDegreeLedger("Gram bases cannot reach every monomial of the polynomial");
    for (const auto& [d, parts] : id.coeff) {
        const CRational target = F.coeff(d);
        sdp::Constraint re{parts.first.functional(), target.re.get_d()};
        if (is_zero_degree(d)) re.lhs.free_terms.push_back({0, 1.0});
        prob.constraints.push_back(std::move(re));
        if (complex_mode && !is_zero_degree(d))
            prob.constraints.push_back({parts.second.functional(), target.im.get_d()});
    }
}

bool needs_complex(const std::vector<TrigPoly>& polys, const std::vector<DomainPoly>& D) {
    for (const auto& p : polys)
        if (!p.has_real_coefficients()) return true;
    for (const auto& d : D)
        if (!d.D.has_real_coefficients()) return true;
    return false;
}

void start_problem(SosProgram& prog) {
    prog.problem.free_vars = 1;
    prog.problem.objective.free_terms.push_back({0, 1.0});
}

int add_gram_block(SosProgram& prog, int poly, int multiplier, const DegreeTuple& nhat) {
    GramBlock g;
    g.poly = poly;
    g.multiplier = multiplier;
    g.basis.nhat = nhat;
    const int n = static_cast<int>(g.basis.size());
    prog.problem.block_dims.push_back(prog.complex_gram ? 2 * n : n);
    prog.layout.push_back(std::move(g));
    return static_cast<int>(prog.layout.size()) - 1;
}

}  // namespace

SosProgram assemble_global_sdp(const TrigPoly& F, const DegreeTuple& slack) {
    if (static_cast<int>(slack.size()) != F.dims()) throw DimensionMismatch("slack length must equal the number of variables");
    if (!F.is_hermitian()) throw Error("polynomial is not Hermitian");
    SosProgram prog;
    prog.polys = {F};
    prog.complex_gram = needs_complex(prog.polys, {});
    start_problem(prog);
    DegreeTuple nhat = F.degree();
    for (std::size_t i = 0; i < nhat.size(); ++i) {
        nhat[i] += slack[i];
        if (nhat[i] < 0) throw InfeasibleDegreeLedger("negative Gram basis degree");
    }
    const int block = add_gram_block(prog, 0, 0, nhat);
    Identity id;
    add_block(id, block, prog.layout.back().basis, TrigPoly::constant(F.dims(), CRational(1)), prog.complex_gram);
    emit_constraints(prog.problem, id, F, prog.complex_gram);
    return prog;
}

SosProgram assemble_domain_sdp(const std::vector<TrigPoly>& F_list, const std::vector<DomainPoly>& D,
                               const DegreeTuple& slack) {
    if (F_list.empty()) throw Error("no polynomials to certify");
    const int L = F_list.front().dims();
    if (static_cast<int>(slack.size()) != L) throw DimensionMismatch("slack length must equal the number of variables");
    for (const auto& F : F_list) {
        if (F.dims() != L) throw DimensionMismatch("polynomials have different numbers of variables");
        if (!F.is_hermitian()) throw Error("polynomial is not Hermitian");
    }
    for (const auto& d : D)
        if (d.D.dims() != L) throw DimensionMismatch("domain polynomial has the wrong number of variables");

    SosProgram prog;
    prog.polys = F_list;
    prog.domain = D;
    prog.complex_gram = needs_complex(F_list, D);
    start_problem(prog);
    const TrigPoly one = TrigPoly::constant(L, CRational(1));

    for (std::size_t k = 0; k < F_list.size(); ++k) {
        DegreeTuple top = F_list[k].degree();
        for (const auto& d : D) {
            const auto dd = d.D.degree();
            for (int i = 0; i < L; ++i) top[static_cast<std::size_t>(i)] = std::max(top[static_cast<std::size_t>(i)], dd[static_cast<std::size_t>(i)]);
        }
        DegreeTuple n0(static_cast<std::size_t>(L));
        for (int i = 0; i < L; ++i) {
            const auto si = static_cast<std::size_t>(i);
            n0[si] = 2 * ((top[si] + 1) / 2 + slack[si]);
            if (n0[si] < 0) throw InfeasibleDegreeLedger("negative degree for the free SOS term");
        }
        Identity id;
        const int b0 = add_gram_block(prog, static_cast<int>(k), 0, n0);
        add_block(id, b0, prog.layout.back().basis, one, prog.complex_gram);
        for (std::size_t i = 0; i < D.size(); ++i) {
            DegreeTuple ni = n0;
            const auto dd = D[i].D.degree();
            for (int j = 0; j < L; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                ni[sj] -= dd[sj];
                if (ni[sj] < 0)
                    throw InfeasibleDegreeLedger("multiplier of domain polynomial " + std::to_string(i + 1) +
                                                 " for polynomial " + std::to_string(k + 1) +
                                                 " would have negative degree");
            }
            const int bi = add_gram_block(prog, static_cast<int>(k), static_cast<int>(i) + 1, ni);
            add_block(id, bi, prog.layout.back().basis, D[i].D, prog.complex_gram);
        }
        emit_constraints(prog.problem, id, F_list[k], prog.complex_gram);
    }
    return prog;
}

Certificate extract_certificate(const SosProgram& prog, const sdp::SdpSolution& sol) {
    if (sol.blocks.size() != prog.layout.size()) throw ShapeError("solution does not match the program layout");
    Certificate cert;
    cert.epsilon = sol.free_values.empty() ? 0.0 : sol.free_values[0];
    for (std::size_t b = 0; b < prog.layout.size(); ++b) {
        GramBlock g = prog.layout[b];
        const Eigen::MatrixXd& S = sol.blocks[b];
        if (!prog.complex_gram) {
            g.gram = S.cast<std::complex<double>>();
        } else {
            const Eigen::Index n = S.rows() / 2;
            Eigen::MatrixXd re = 0.5 * (S.topLeftCorner(n, n) + S.bottomRightCorner(n, n));
            Eigen::MatrixXd im = 0.5 * (S.bottomLeftCorner(n, n) - S.topRightCorner(n, n));
            g.gram.resize(n, n);
            g.gram.real() = re;
            g.gram.imag() = im;
        }
        cert.blocks.push_back(std::move(g));
    }
    return cert;
}

namespace {

double abs_exact(const CRational& c) {
    Rational m2 = c.re * c.re + c.im * c.im;
    return std::sqrt(m2.get_d());
}

bool exactly_hermitian(const Eigen::MatrixXcd& G) {
    for (Eigen::Index i = 0; i < G.rows(); ++i)
        for (Eigen::Index j = i; j < G.cols(); ++j)
            if (G(i, j) != std::conj(G(j, i))) return false;
    return true;
}

}  // namespace

VerificationReport verify_certificate(const Certificate& cert, const std::vector<TrigPoly>& F_list,
                                      const std::vector<DomainPoly>& D, const VerifyOptions& opts) {
    if (F_list.empty()) throw ShapeError("no polynomials given");
    const int L = F_list.front().dims();
    std::vector<TrigPoly> sums(F_list.size(), TrigPoly(L));
    std::vector<double> penalty(F_list.size(), 0.0);
    VerificationReport rep;
    rep.min_eig = std::numeric_limits<double>::infinity();
    bool hermitian = true;

    for (std::size_t b = 0; b < cert.blocks.size(); ++b) {
        const auto& g = cert.blocks[b];
        if (g.poly < 0 || g.poly >= static_cast<int>(F_list.size()))
            throw ShapeError("block " + std::to_string(b) + " refers to an unknown polynomial");
        if (g.multiplier < 0 || g.multiplier > static_cast<int>(D.size()))
            throw ShapeError("block " + std::to_string(b) + " refers to an unknown domain polynomial");
        if (static_cast<int>(g.basis.nhat.size()) != L) throw ShapeError("block " + std::to_string(b) + " has wrong basis dimension");
        for (int v : g.basis.nhat)
            if (v < 0) throw ShapeError("block " + std::to_string(b) + " has a negative basis degree");
        const auto n = static_cast<Eigen::Index>(g.basis.size());
        if (g.gram.rows() != n || g.gram.cols() != n)
            throw ShapeError("block " + std::to_string(b) + " is " + std::to_string(g.gram.rows()) + "x" +
                             std::to_string(g.gram.cols()) + ", basis needs " + std::to_string(n));
        if (!g.gram.allFinite()) throw ShapeError("block " + std::to_string(b) + " has non-finite entries");

        if (!exactly_hermitian(g.gram)) {
            hermitian = false;
            rep.message = "Gram block " + std::to_string(b) + " is not Hermitian";
        }
        TrigPoly H = gram_polynomial(g.gram, g.basis);
        if (g.multiplier > 0) H = H * D[static_cast<std::size_t>(g.multiplier - 1)].D;
        sums[static_cast<std::size_t>(g.poly)] += H;

        const Eigen::MatrixXcd herm = 0.5 * (g.gram + g.gram.adjoint());
        const auto psd = g.gram.imag().isZero(0.0) ? sdp::psd_check(herm.real(), opts.ptol)
                                                   : sdp::psd_check(sdp::hermitian_embed(herm, 1e300), opts.ptol);
        rep.min_eig = std::min(rep.min_eig, psd.min_eig);
        if (g.multiplier == 0) penalty[static_cast<std::size_t>(g.poly)] += static_cast<double>(n) * std::min(0.0, psd.min_eig);
    }
    if (cert.blocks.empty()) rep.min_eig = 0.0;

    const CRational eps(rational_from_double(cert.epsilon));
    rep.lower_bound = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < F_list.size(); ++k) {
        const TrigPoly& F = F_list[k];
        if (F.dims() != L) throw ShapeError("polynomials have different numbers of variables");
        double scale = 1.0;
        for (const auto& [d, c] : F.terms()) scale = std::max(scale, abs_exact(c));
        TrigPoly r = F - TrigPoly::constant(L, eps) - sums[k];
        double total = 0.0;
        for (const auto& [d, c] : r.terms()) {
            total += abs_exact(c);
            const double rel = abs_exact(c) / scale;
            if (rel > rep.residual) {
                rep.residual = rel;
                rep.worst_poly = static_cast<int>(k);
                rep.worst_degree = d;
            }
        }
        rep.lower_bound = std::min(rep.lower_bound, cert.epsilon - total + penalty[k]);
    }

    const bool psd_ok = rep.min_eig >= -opts.ptol;
    const bool res_ok = rep.residual <= opts.rtol;
    rep.valid = hermitian && psd_ok && res_ok;
    if (rep.message.empty()) {
        if (!res_ok)
            rep.message = "coefficient mismatch " + std::to_string(rep.residual) + " exceeds tolerance";
        else if (!psd_ok)
            rep.message = "Gram matrix has eigenvalue " + std::to_string(rep.min_eig) + " below tolerance";
        else
            rep.message = "ok";
    }
    return rep;
}

namespace {

constexpr mp_bitcnt_t kGridBits = 256;

struct BigComplex {
    mpf_class re{0, kGridBits};
    mpf_class im{0, kGridBits};
};

BigComplex mul(const BigComplex& a, const BigComplex& b) {
    BigComplex out;
    out.re = a.re * b.re - a.im * b.im;
    out.im = a.re * b.im + a.im * b.re;
    return out;
}

// Powers w^0..w^(n-1) of w = exp(2 pi i / n), refined by Newton steps on z^n = 1.
std::vector<BigComplex> roots_of_unity(int n) {
    BigComplex w;
    w.re = std::cos(2.0 * std::numbers::pi / n);
    w.im = std::sin(2.0 * std::numbers::pi / n);
    for (int it = 0; it < 6; ++it) {
        BigComplex p;  // w^(n-1)
        p.re = 1;
        for (int k = 0; k < n - 1; ++k) p = mul(p, w);
        // w <- w (1 - 1/n) + 1/(n p)
        mpf_class norm(p.re * p.re + p.im * p.im, kGridBits);
        norm *= n;
        BigComplex next;
        next.re = w.re * (n - 1) / n + p.re / norm;
        next.im = w.im * (n - 1) / n - p.im / norm;
        w = next;
    }
    std::vector<BigComplex> pw(static_cast<std::size_t>(n));
    pw[0].re = 1;
    for (int k = 1; k < n; ++k) pw[static_cast<std::size_t>(k)] = mul(pw[static_cast<std::size_t>(k - 1)], w);
    return pw;
}

struct FoldedPoly {
    std::vector<std::vector<int>> exps;  // each in [0, period)
    std::vector<CRational> coeffs;
    std::vector<std::complex<double>> approx;
    double mass = 0.0;
};

// Exponents reduced mod the periods; values on the grid are unchanged.
FoldedPoly fold(const TrigPoly& p, const std::vector<int>& periods) {
    std::map<std::vector<int>, CRational> acc;
    for (const auto& [d, c] : p.terms()) {
        std::vector<int> e(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) e[i] = ((d[i] % periods[i]) + periods[i]) % periods[i];
        acc[e] += c;
    }
    FoldedPoly f;
    for (const auto& [e, c] : acc) {
        if (c.is_zero()) continue;
        f.exps.push_back(e);
        f.coeffs.push_back(c);
        f.approx.push_back(c.to_complex());
        f.mass += std::abs(f.approx.back());
    }
    return f;
}

}  // namespace

GridMinimum finite_grid_positivity(const std::vector<TrigPoly>& F_list, const std::vector<int>& periods) {
    GridMinimum out;
    out.min_value = std::numeric_limits<double>::infinity();
    std::size_t total = 1;
    for (int p : periods) {
        if (p < 1) throw Error("periods must be positive");
        total *= static_cast<std::size_t>(p);
    }
    std::vector<std::vector<std::complex<double>>> unit(periods.size());
    for (std::size_t i = 0; i < periods.size(); ++i)
        for (int k = 0; k < periods[i]; ++k) unit[i].push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / periods[i]));
    std::vector<std::vector<BigComplex>> big(periods.size());

    for (std::size_t k = 0; k < F_list.size(); ++k) {
        if (F_list[k].dims() != static_cast<int>(periods.size()))
            throw DimensionMismatch("polynomial and grid dimensions differ");
        const FoldedPoly f = fold(F_list[k], periods);
        const double terms = static_cast<double>(f.coeffs.size() + periods.size() + 4);
        const double bound_double = 8.0 * terms * std::numeric_limits<double>::epsilon() * f.mass;
        const double bound_big = terms * std::ldexp(f.mass, -static_cast<int>(kGridBits) + 32);

        std::vector<int> idx(periods.size(), 0);
        for (std::size_t p = 0; p < total; ++p) {
            std::complex<double> acc = 0.0;
            for (std::size_t t = 0; t < f.coeffs.size(); ++t) {
                std::complex<double> v = f.approx[t];
                for (std::size_t i = 0; i < periods.size(); ++i)
                    v *= unit[i][static_cast<std::size_t>((f.exps[t][i] * idx[i]) % periods[i])];
                acc += v;
            }
            double value = acc.real();
            double bound = bound_double;
            if (std::abs(value) <= bound_double) {
                BigComplex sum;
                for (std::size_t t = 0; t < f.coeffs.size(); ++t) {
                    BigComplex v;
                    v.re = f.coeffs[t].re;
                    v.im = f.coeffs[t].im;
                    for (std::size_t i = 0; i < periods.size(); ++i) {
                        if (big[i].empty()) big[i] = roots_of_unity(periods[i]);
                        v = mul(v, big[i][static_cast<std::size_t>((f.exps[t][i] * idx[i]) % periods[i])]);
                    }
                    sum.re += v.re;
                }
                value = sum.re.get_d();
                bound = bound_big;
            }
            if (value < out.min_value) {
                out.min_value = value;
                out.error_bound = bound;
                out.poly = static_cast<int>(k);
                out.index = idx;
                out.point.resize(periods.size());
                for (std::size_t i = 0; i < periods.size(); ++i) out.point[i] = unit[i][static_cast<std::size_t>(idx[i])];
            }
            for (std::size_t i = 0; i < periods.size(); ++i) {
                if (++idx[i] < periods[i]) break;
                idx[i] = 0;
            }
        }
    }
    return out;
}

namespace {

// 17 significant digits, enough to reproduce the double exactly.
std::string decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double number(const json& v) {
    if (v.is_number()) return v.get<double>();
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("certificate: bad number '" + s + "'");
    }
    if (used != s.size()) throw ParseError("certificate: bad number '" + s + "'");
    return out;
}

}  // namespace

std::string certificate_to_json(const Certificate& cert, int indent) {
    json j;
    j["epsilon"] = decimal(cert.epsilon);
    j["residual"] = decimal(cert.residual);
    j["min_eig"] = decimal(cert.min_eig);
    j["valid"] = cert.valid;
    j["model_hash"] = cert.model_hash;
    j["blocks"] = json::array();
    for (const auto& g : cert.blocks) {
        json re = json::array();
        json im = json::array();
        for (Eigen::Index r = 0; r < g.gram.rows(); ++r) {
            json rr = json::array();
            json ri = json::array();
            for (Eigen::Index c = 0; c < g.gram.cols(); ++c) {
                rr.push_back(decimal(g.gram(r, c).real()));
                ri.push_back(decimal(g.gram(r, c).imag()));
            }
            re.push_back(std::move(rr));
            im.push_back(std::move(ri));
        }
        j["blocks"].push_back({{"poly", g.poly}, {"multiplier", g.multiplier}, {"nhat", g.basis.nhat}, {"re", re}, {"im", im}});
    }
    return j.dump(indent);
}

Certificate certificate_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("certificate: ") + e.what());
    }
    try {
        Certificate cert;
        cert.epsilon = number(j.at("epsilon"));
        if (j.contains("residual")) cert.residual = number(j.at("residual"));
        if (j.contains("min_eig")) cert.min_eig = number(j.at("min_eig"));
        cert.valid = j.value("valid", false);
        cert.model_hash = j.value("model_hash", std::string());
        for (const auto& b : j.at("blocks")) {
            GramBlock g;
            g.poly = b.at("poly").get<int>();
            g.multiplier = b.at("multiplier").get<int>();
            g.basis.nhat = b.at("nhat").get<std::vector<int>>();
            const auto& re = b.at("re");
            const auto& im = b.at("im");
            const auto n = static_cast<Eigen::Index>(re.size());
            if (static_cast<Eigen::Index>(im.size()) != n) throw ShapeError("re and im parts differ in size");
            g.gram.resize(n, n);
            for (Eigen::Index r = 0; r < n; ++r) {
                const auto& rr = re.at(static_cast<std::size_t>(r));
                const auto& ri = im.at(static_cast<std::size_t>(r));
                if (static_cast<Eigen::Index>(rr.size()) != n || static_cast<Eigen::Index>(ri.size()) != n)
                    throw ShapeError("Gram block is not square");
                for (Eigen::Index c = 0; c < n; ++c)
                    g.gram(r, c) = {number(rr.at(static_cast<std::size_t>(c))), number(ri.at(static_cast<std::size_t>(c)))};
            }
            cert.blocks.push_back(std::move(g));
        }
        return cert;
    } catch (const json::exception& e) {
        throw ParseError(std::string("certificate: ") + e.what());
    }
}

}  // namespace sisstab
