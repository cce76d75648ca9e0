#include "sisstab/certify.hpp"

#include <algorithm>
#include <cmath>

#include "sisstab/errors.hpp"
#include "sisstab/oracle.hpp"

namespace sisstab {

std::string to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Stable: return "Stable";
        case VerdictStatus::NotStable: return "NotStable";
        case VerdictStatus::Indeterminate: return "Indeterminate";
    }
    return "?";
}

MatTrigPoly build_K(const ResolventPolys& rp) { return circle_conj(rp.h) * rp.H; }

MatTrigPoly build_K(const SisModel& m) { return build_K(build_h_H(m)); }

TrigPoly build_F_from_K(const MatTrigPoly& K, int size_limit) {
    if (!K.is_square()) throw ShapeError("K must be square");
    const int n0 = K.rows();
    const MatTrigPoly I = MatTrigPoly::identity(n0, K.dims());
    const MatTrigPoly W = kron(K, I) + kron(I, circle_conj(K));
    return det(-W, size_limit);
}

TrigPoly build_F_thm1(const SisModel& m, int size_limit) {
    if (m.n0 * m.n0 > size_limit)
        throw SizeLimitExceeded("n0^2 = " + std::to_string(m.n0 * m.n0) + " exceeds the determinant size cap");
    return build_F_from_K(build_K(build_h_H(m, size_limit)), size_limit);
}

namespace {

// Polynomial in lambda with TrigPoly coefficients, lowest power first.
struct LambdaPoly {
    int dims = 1;
    std::vector<TrigPoly> c;

    const TrigPoly& at(std::size_t i, const TrigPoly& zero) const { return i < c.size() ? c[i] : zero; }
};

LambdaPoly combine(const LambdaPoly& a, const LambdaPoly& b, bool subtract) {
    LambdaPoly out{a.dims, {}};
    const TrigPoly zero(a.dims);
    const std::size_t n = std::max(a.c.size(), b.c.size());
    out.c.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.c.push_back(subtract ? a.at(i, zero) - b.at(i, zero) : a.at(i, zero) + b.at(i, zero));
    return out;
}

LambdaPoly operator+(const LambdaPoly& a, const LambdaPoly& b) { return combine(a, b, false); }
LambdaPoly operator-(const LambdaPoly& a, const LambdaPoly& b) { return combine(a, b, true); }

LambdaPoly operator*(const LambdaPoly& a, const LambdaPoly& b) {
    LambdaPoly out{a.dims, {}};
    if (a.c.empty() || b.c.empty()) return out;
    out.c.assign(a.c.size() + b.c.size() - 1, TrigPoly(a.dims));
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.c.size(); ++j)
            if (!b.c[j].is_zero()) out.c[i + j] += a.c[i] * b.c[j];
    }
    return out;
}

bool is_one(const TrigPoly& p) { return p.is_constant() && p.constant_term() == CRational(1); }

}  // namespace

std::vector<TrigPoly> char_poly_K(const MatTrigPoly& K, int size_limit) {
    if (!K.is_square()) throw ShapeError("characteristic polynomial of a non-square matrix");
    const int n = K.rows();
    if (n > size_limit) throw SizeLimitExceeded("matrix exceeds the determinant size cap");
    const int dims = K.dims();
    std::vector<LambdaPoly> entries;
    entries.reserve(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            LambdaPoly e{dims, {-K(r, c)}};
            if (r == c) e.c.push_back(TrigPoly::constant(dims, CRational(1)));
            entries.push_back(std::move(e));
        }
    LambdaPoly m = subset_determinant(entries, n, LambdaPoly{dims, {}},
                                      LambdaPoly{dims, {TrigPoly::constant(dims, CRational(1))}});
    m.c.resize(static_cast<std::size_t>(n + 1), TrigPoly(dims));
    return m.c;
}

std::vector<TrigPoly> build_phi(const std::vector<TrigPoly>& m) {
    if (m.empty()) throw Error("empty characteristic polynomial");
    const int dims = m.front().dims();
    LambdaPoly a{dims, m};
    LambdaPoly b{dims, {}};
    for (const auto& c : m) b.c.push_back(circle_conj(c));
    LambdaPoly phi = a * b;
    phi.c.resize(2 * m.size() - 1, TrigPoly(dims));
    return phi.c;
}

RouthTable routh_table(const std::vector<TrigPoly>& phi) {
    if (phi.size() < 3 || phi.size() % 2 == 0) throw ShapeError("phi needs 2n0+1 coefficients with n0 >= 1");
    if (!is_one(phi.back())) throw Error("phi must be monic");
    const int top = static_cast<int>(phi.size()) - 1;  // 2 n0
    const int dims = phi.front().dims();
    const TrigPoly zero(dims);
    const TrigPoly one = TrigPoly::constant(dims, CRational(1));

    // Division-free rows: e_{i,j} = N_{i,j} / Q_i with
    // N_{i,j} = N_{i-1,0} N_{i-2,j+1} - N_{i-2,0} N_{i-1,j+1} and Q_i = Q_{i-2} N_{i-1,0}.
    std::vector<std::vector<TrigPoly>> N(static_cast<std::size_t>(top + 1));
    for (int j = top; j >= 0; j -= 2) N[0].push_back(phi[static_cast<std::size_t>(j)]);
    for (int j = top - 1; j >= 0; j -= 2) N[1].push_back(phi[static_cast<std::size_t>(j)]);
    auto get = [&](int i, int j) -> const TrigPoly& {
        const auto& row = N[static_cast<std::size_t>(i)];
        return j < static_cast<int>(row.size()) ? row[static_cast<std::size_t>(j)] : zero;
    };
    std::vector<std::vector<const TrigPoly*>> Q(static_cast<std::size_t>(top + 1));
    for (int i = 2; i <= top; ++i) {
        const TrigPoly& lead = get(i - 1, 0);
        if (lead.is_zero())
            throw DegenerateTable("leading entry of Routh row " + std::to_string(i - 1) + " vanishes identically", i - 1);
        const int len = static_cast<int>(N[static_cast<std::size_t>(i - 2)].size()) - 1;
        for (int j = 0; j < len; ++j)
            N[static_cast<std::size_t>(i)].push_back(lead * get(i - 2, j + 1) - get(i - 2, 0) * get(i - 1, j + 1));
        Q[static_cast<std::size_t>(i)] = Q[static_cast<std::size_t>(i - 2)];
        Q[static_cast<std::size_t>(i)].push_back(&lead);
    }

    RouthTable t;
    for (int i = 0; i <= top; ++i) {
        TrigPoly ehat = one;
        for (int k = i - 1; k >= 0; k -= 2) ehat = ehat * t.ebar[static_cast<std::size_t>(k)];
        TrigPoly denom = one;
        for (const TrigPoly* q : Q[static_cast<std::size_t>(i)]) denom = denom * *q;
        TrigPoly num = get(i, 0) * ehat;
        t.ebar.push_back(denom == one ? num : exact_div(num, denom));
        t.ehat.push_back(std::move(ehat));
    }
    for (int i = 0; i <= top; ++i) {
        const TrigPoly& e = t.ebar[static_cast<std::size_t>(i)];
        if (e.is_constant()) {
            if (is_nonpositive_constant(e)) t.nonpositive_set.push_back(i);
        } else {
            t.nonconstant_polys.push_back(e);
            t.nonconstant_rows.push_back(i);
        }
    }
    return t;
}

namespace {

DegreeTuple slack_for(const SisModel& m, const AnalyzeOptions& opts) {
    if (opts.slack.empty()) return DegreeTuple(static_cast<std::size_t>(m.L()), 0);
    if (static_cast<int>(opts.slack.size()) != m.L()) throw DimensionMismatch("slack needs one entry per direction");
    for (int e : opts.slack)
        if (e < 0) throw Error("slack entries must be nonnegative");
    return opts.slack;
}

std::string describe_point(const std::vector<std::complex<double>>& z) {
    std::string s = "(";
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (i) s += ", ";
        s += "angle " + std::to_string(std::arg(z[i]));
    }
    return s + ")";
}

// Samples A(z) and reports the worst point when it is confirmed unstable.
std::optional<SampleResult> unstable_point(const SisModel& m, int per_circle) {
    if (per_circle <= 0) return std::nullopt;
    std::vector<int> grid(static_cast<std::size_t>(m.L()), per_circle);
    SampleResult r = freq_sample_abscissa(m, grid);
    if (r.max_abscissa > 0 && !hurwitz_lyapunov(eval_A(m, r.argmax))) return r;
    return std::nullopt;
}

Verdict not_stable_at(const SampleResult& r, const std::string& condition) {
    Verdict v;
    v.status = VerdictStatus::NotStable;
    v.condition = condition;
    v.witness = r.argmax;
    v.reason = "A(z) has spectral abscissa " + std::to_string(r.max_abscissa) + " at " + describe_point(r.argmax);
    return v;
}

void require_wellposed(const ResolventPolys& rp) {
    if (rp.h.is_zero()) throw WellPosednessError("det(Delta(z) - A_SS) vanishes identically");
}

// Solves the SOS program and turns the result into a verdict. Falls back to
// a sampled witness search when no positive bound is certified.
Verdict finish_sos(const SisModel& m, const SosProgram& prog, const AnalyzeOptions& opts, std::vector<TrigPoly> polys) {
    Verdict v;
    v.polys = std::move(polys);
    const auto sol = sdp::solve(prog.problem, opts.solver);
    Certificate cert = extract_certificate(prog, sol);
    const auto rep = verify_certificate(cert, prog.polys, prog.domain, opts.verify);
    cert.residual = rep.residual;
    cert.min_eig = rep.min_eig;
    cert.valid = rep.valid;
    v.epsilon_star = cert.epsilon;
    v.certificate = cert;
    v.condition = "sos-certificate";

    if (sol.status == sdp::SdpStatus::Optimal && rep.valid && rep.lower_bound > 0) {
        v.status = VerdictStatus::Stable;
        v.reason = "certified eps = " + std::to_string(cert.epsilon) + " (guaranteed lower bound " +
                   std::to_string(rep.lower_bound) + ")";
        return v;
    }
    if (auto w = unstable_point(m, opts.witness_grid)) {
        Verdict ns = not_stable_at(*w, "sampled-abscissa");
        ns.epsilon_star = v.epsilon_star;
        ns.polys = std::move(v.polys);
        return ns;
    }
    v.status = VerdictStatus::Indeterminate;
    if (sol.status != sdp::SdpStatus::Optimal)
        v.reason = "SDP solver stopped with status " + sdp::to_string(sol.status) + "; try a larger slack";
    else if (!rep.valid)
        v.reason = "certificate failed verification: " + rep.message;
    else
        v.reason = "no positive bound at this slack (eps = " + std::to_string(cert.epsilon) +
                   ") and no unstable sample found; try a larger slack";
    return v;
}

}  // namespace

Verdict analyze_infinite(const SisModel& m, const AnalyzeOptions& opts) {
    m.validate();
    if (!m.all_infinite()) throw UnsupportedError("the global test needs every direction infinite");
    const DegreeTuple slack = slack_for(m, opts);
    const ResolventPolys rp = build_h_H(m, opts.size_limit);
    require_wellposed(rp);

    const Eigen::MatrixXcd A1 = eval_A_at_one(m);
    if (!hurwitz_lyapunov(A1)) {
        Verdict v;
        v.status = VerdictStatus::NotStable;
        v.condition = "hurwitz-at-one";
        v.witness.assign(static_cast<std::size_t>(m.L()), 1.0);
        v.reason = "A(1) is not Hurwitz (spectral abscissa " + std::to_string(spectral_abscissa(A1)) + ")";
        return v;
    }
    if (auto w = unstable_point(m, opts.prescreen_grid)) return not_stable_at(*w, "sampled-abscissa");

    if (m.n0 * m.n0 > opts.size_limit)
        throw SizeLimitExceeded("n0^2 = " + std::to_string(m.n0 * m.n0) + " exceeds the determinant size cap");
    TrigPoly F = build_F_from_K(build_K(rp), opts.size_limit);
    SosProgram prog = assemble_global_sdp(F, slack);
    return finish_sos(m, prog, opts, {F});
}

Verdict analyze_periodic(const SisModel& m, const AnalyzeOptions& opts) {
    m.validate();
    if (m.has_finite()) throw UnsupportedError("finite-extent directions are not supported");
    const DegreeTuple slack = slack_for(m, opts);
    const ResolventPolys rp = build_h_H(m, opts.size_limit);
    require_wellposed(rp);

    RouthTable table;
    try {
        table = routh_table(build_phi(char_poly_K(build_K(rp), opts.size_limit)));
    } catch (const DegenerateTable& e) {
        Verdict v;
        v.status = VerdictStatus::NotStable;
        v.condition = "routh-degenerate";
        v.witness_row = e.row;
        v.reason = e.what();
        return v;
    }
    if (!table.nonpositive_set.empty()) {
        Verdict v;
        v.status = VerdictStatus::NotStable;
        v.condition = "routh-nonpositive";
        v.witness_row = table.nonpositive_set.front();
        v.reason = "Routh row " + std::to_string(*v.witness_row) + " is the non-positive constant " +
                   pretty(table.ebar[static_cast<std::size_t>(*v.witness_row)]);
        return v;
    }
    if (table.nonconstant_polys.empty()) {
        Verdict v;
        v.status = VerdictStatus::Stable;
        v.condition = "routh-constant";
        v.reason = "every cleared Routh entry is a positive constant";
        return v;
    }

    if (m.all_periodic()) {
        std::vector<int> periods;
        for (const auto& d : m.directions) periods.push_back(d.period);
        const GridMinimum gm = finite_grid_positivity(table.nonconstant_polys, periods);
        Verdict v;
        v.polys = table.nonconstant_polys;
        v.epsilon_star = gm.min_value;
        v.condition = "grid-positivity";
        const double margin = gm.error_bound;
        if (gm.min_value > margin) {
            v.status = VerdictStatus::Stable;
            v.reason = "every F_k is positive on the roots-of-unity grid (min " + std::to_string(gm.min_value) + ")";
        } else if (gm.min_value < -margin) {
            v.status = VerdictStatus::NotStable;
            v.witness = gm.point;
            v.reason = "F_" + std::to_string(gm.poly + 1) + " = " + std::to_string(gm.min_value) + " at " +
                       describe_point(gm.point);
        } else {
            v.status = VerdictStatus::Indeterminate;
            v.witness = gm.point;
            v.reason = "grid minimum " + std::to_string(gm.min_value) + " is within rounding of zero";
        }
        return v;
    }

    if (auto w = unstable_point(m, opts.prescreen_grid)) return not_stable_at(*w, "sampled-abscissa");
    SosProgram prog = assemble_domain_sdp(table.nonconstant_polys, build_domain_polys(m.directions), slack);
    return finish_sos(m, prog, opts, table.nonconstant_polys);
}

SosTargets sos_targets(const SisModel& m, int size_limit) {
    m.validate();
    if (m.has_finite()) throw UnsupportedError("finite-extent directions are not supported");
    const ResolventPolys rp = build_h_H(m, size_limit);
    require_wellposed(rp);
    if (m.all_infinite()) return {{build_F_from_K(build_K(rp), size_limit)}, {}};
    const RouthTable t = routh_table(build_phi(char_poly_K(build_K(rp), size_limit)));
    if (!t.nonpositive_set.empty()) throw Error("a Routh row is a non-positive constant; no certificate applies");
    if (t.nonconstant_polys.empty()) throw Error("every Routh row is a positive constant; nothing to certify");
    return {t.nonconstant_polys, build_domain_polys(m.directions)};
}

Verdict analyze(const SisModel& m, const AnalyzeOptions& opts) {
    m.validate();
    if (m.has_finite()) throw UnsupportedError("finite-extent directions are not supported");
    if (m.all_infinite()) return analyze_infinite(m, opts);
    return analyze_periodic(m, opts);
}

}  // namespace sisstab
