#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sisstab/certify.hpp"
#include "sisstab/errors.hpp"
#include "sisstab/oracle.hpp"
#include "sisstab/sos.hpp"
#include "support/examples.hpp"
#include "support/oracles.hpp"

using namespace sisstab;
using sisstab::testing::cd;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Records the first failure and keeps checking.
struct Checker {
    Outcome out;
    std::ostringstream notes;

    void expect(bool ok, const std::string& what) {
        if (!ok && out.pass) {
            out.pass = false;
            out.detail = what;
        }
    }
    Outcome finish() {
        if (out.pass) out.detail = notes.str();
        return out;
    }
};

TrigPoly k(int dims, long num, long den = 1) { return TrigPoly::constant(dims, CRational(Rational(num, den))); }

TrigPoly z(int dims, int var, int power = 1) { return TrigPoly::variable(dims, var, power); }

std::string num(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

double rounded4(const Rational& q) { return std::round(q.get_d() * 1e4) / 1e4; }

Outcome example1_exact() {
    Checker c;
    const SisModel m = sisstab::testing::example1();
    const ResolventPolys rp = build_h_H(m);
    c.expect(rp.h == k(2, 1), "h != 1");
    MatTrigPoly H(2, 2, 2);
    H(0, 0) = k(2, -1, 2);
    H(0, 1) = k(2, 1, 2) * z(2, 0, -1);
    H(1, 0) = k(2, -1, 4) * z(2, 1, -1);
    H(1, 1) = k(2, -1);
    c.expect(rp.H == H, "H differs");
    const Eigen::MatrixXcd a1 = eval_A_at_one(m);
    c.expect(a1(0, 0) == cd(-0.5) && a1(0, 1) == cd(0.5) && a1(1, 0) == cd(-0.25) && a1(1, 1) == cd(-1.0),
             "A(1,1) differs");
    TrigPoly::Terms t;
    t[{2, 2}] = Rational(1, 64);
    t[{-2, -2}] = Rational(1, 64);
    t[{1, 1}] = Rational(9, 16);
    t[{-1, -1}] = Rational(9, 16);
    t[{0, 0}] = Rational(143, 32);
    const TrigPoly F = build_F_thm1(m);
    c.expect(F == TrigPoly::from_terms(2, t), "F = " + pretty(F));
    c.notes << "F = " << pretty(F);
    return c.finish();
}

Outcome example1_sdp() {
    Checker c;
    const SisModel m = sisstab::testing::example1();
    const Verdict v = analyze_infinite(m);
    c.expect(v.status == VerdictStatus::Stable, "verdict " + to_string(v.status) + ": " + v.reason);
    c.expect(v.epsilon_star && std::abs(*v.epsilon_star - 3.375) <= 5e-3,
             "eps* = " + (v.epsilon_star ? num(*v.epsilon_star) : std::string("none")));
    if (v.certificate) {
        const auto rep = verify_certificate(*v.certificate, {build_F_thm1(m)}, {});
        c.expect(rep.residual < 1e-6, "residual " + num(rep.residual));
        c.expect(rep.min_eig >= -1e-8, "min eigenvalue " + num(rep.min_eig));
        c.notes << "eps* = " << num(*v.epsilon_star, "%.6f") << ", residual " << num(rep.residual, "%.2e")
                << ", min eig " << num(rep.min_eig, "%.2e");
    } else {
        c.expect(false, "no certificate");
    }
    return c.finish();
}

Outcome example2_routh() {
    Checker c;
    const RouthTable t = routh_table(build_phi(char_poly_K(build_K(sisstab::testing::example2()))));
    c.expect(t.ebar.size() == 5, "table has " + std::to_string(t.ebar.size()) + " rows");
    if (t.ebar.size() != 5) return c.finish();
    c.expect(t.ebar[0] == k(2, 1), "ebar0 = " + pretty(t.ebar[0]));
    c.expect(t.ebar[1] == k(2, 4), "ebar1 = " + pretty(t.ebar[1]));
    TrigPoly::Terms e2;
    e2[{-1, -1}] = Rational(1, 4);
    e2[{0, 0}] = Rational(20);
    e2[{1, 1}] = Rational(1, 4);
    c.expect(t.ebar[2] == TrigPoly::from_terms(2, e2), "ebar2 = " + pretty(t.ebar[2]));
    c.expect(t.ebar[3].constant_term() == CRational(Rational(511, 8)), "ebar3 constant differs");
    c.expect(t.ebar[3].coeff({-2, -2}) == CRational(Rational(1, 16)) &&
                 t.ebar[3].coeff({-1, -1}) == CRational(Rational(4)),
             "ebar3 r1 coefficients differ: " + pretty(t.ebar[3]));
    const TrigPoly& e4 = t.ebar[4];
    c.expect(rounded4(e4.constant_term().re) == 263.4922, "ebar4 constant " + pretty(e4));
    c.expect(rounded4(e4.coeff({-3, -3}).re) == rounded4(Rational(1, 32)), "ebar4 (-3,-3) " + pretty(e4));
    c.expect(rounded4(e4.coeff({-2, -2}).re) == 2.2539, "ebar4 (-2,-2) " + pretty(e4));
    c.expect(rounded4(e4.coeff({-1, -1}).re) == 48.2188, "ebar4 (-1,-1) " + pretty(e4));
    c.expect(t.nonpositive_set.empty(), "non-positive set not empty");
    c.notes << "ebar4 = " << pretty(e4);
    return c.finish();
}

Outcome example2_sdp() {
    Checker c;
    const SisModel m = sisstab::testing::example2();
    const Verdict v = analyze_periodic(m);
    c.expect(v.status == VerdictStatus::Stable, "verdict " + to_string(v.status) + ": " + v.reason);
    c.expect(v.epsilon_star && std::abs(*v.epsilon_star - 19.5) <= 5e-2,
             "eps* = " + (v.epsilon_star ? num(*v.epsilon_star) : std::string("none")));
    if (v.certificate) {
        const SosTargets tg = sos_targets(m);
        const auto rep = verify_certificate(*v.certificate, tg.polys, tg.domain);
        c.expect(rep.valid, "certificate invalid: " + rep.message);
        c.expect(rep.lower_bound > 0, "lower bound " + num(rep.lower_bound));
        c.notes << "eps* = " << num(*v.epsilon_star, "%.6f") << " over " << tg.polys.size()
                << " polynomials, residual " << num(rep.residual, "%.2e");
    } else {
        c.expect(false, "no certificate");
    }
    return c.finish();
}

Outcome oracle_concordance() {
    Checker c;
    sisstab::testing::Rng rng(2024);
    sisstab::testing::RandomModelOptions o;
    int stable = 0, unstable = 0, indeterminate = 0, contradictions = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const SisModel m = sisstab::testing::random_model(rng, o);
        const SampleResult s = freq_sample_abscissa(m, std::vector<int>(static_cast<std::size_t>(m.L()), 32));
        Verdict v;
        try {
            v = analyze(m);
        } catch (const std::exception& e) {
            c.expect(false, "model " + std::to_string(trial) + " threw: " + e.what());
            continue;
        }
        switch (v.status) {
            case VerdictStatus::Stable: ++stable; break;
            case VerdictStatus::NotStable: ++unstable; break;
            case VerdictStatus::Indeterminate: ++indeterminate; break;
        }
        const bool bad = v.status == VerdictStatus::Stable && s.max_abscissa >= 0;
        if (bad) {
            ++contradictions;
            c.expect(false, "model " + std::to_string(trial) + " Stable with sampled abscissa " + num(s.max_abscissa));
        }
    }
    c.notes << stable << " stable, " << unstable << " not stable, " << indeterminate << " indeterminate, "
            << contradictions << " contradictions";
    return c.finish();
}

SisModel constant_system(const RatMatrix& att) {
    SisModel m;
    m.n0 = att.rows;
    m.directions = {DirectionSpec::periodic(3, 1, 1)};
    m.A_TT = att;
    m.A_TS = RatMatrix(m.n0, 2);
    m.A_ST = RatMatrix(2, m.n0);
    m.A_SS = RatMatrix(2, 2);
    return m;
}

Outcome routh_vs_lyapunov() {
    Checker c;
    sisstab::testing::Rng rng(77);
    int hurwitz = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + trial % 2;
        const SisModel m = constant_system(sisstab::testing::random_ratmatrix(rng, n, n, 4));
        bool routh_ok = false;
        try {
            const RouthTable t = routh_table(build_phi(char_poly_K(build_K(m))));
            routh_ok = t.nonpositive_set.empty() && t.nonconstant_polys.empty();
            for (const auto& e : t.ebar) routh_ok = routh_ok && e.is_constant() && e.constant_term().re > 0;
        } catch (const DegenerateTable&) {
            routh_ok = false;
        }
        const bool lyap = hurwitz_lyapunov(sisstab::testing::to_complex(m.A_TT));
        hurwitz += lyap;
        c.expect(routh_ok == lyap, "instance " + std::to_string(trial) + ": Routh " + std::to_string(routh_ok) +
                                       ", Lyapunov " + std::to_string(lyap));
        const bool verdict_stable = analyze_periodic(m).status == VerdictStatus::Stable;
        c.expect(verdict_stable == lyap, "instance " + std::to_string(trial) + ": verdict disagrees with Lyapunov");
    }
    c.notes << "500 instances, " << hurwitz << " Hurwitz";
    return c.finish();
}

Outcome fhat_identity() {
    Checker c;
    sisstab::testing::Rng rng(99);
    double worst = 0.0, worst_double = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const SisModel m = sisstab::testing::random_model(rng);
        const ResolventPolys rp = build_h_H(m);
        const TrigPoly F = build_F_from_K(build_K(rp));
        for (int s = 0; s < 20; ++s) {
            // exact rational point of the torus
            const auto q = sisstab::testing::rational_torus_point(rng, m.L());
            const CRational h = sisstab::testing::exact_eval(rp.h, q);
            CRational ref = sisstab::testing::exact_fhat(sisstab::testing::exact_A(m, q));
            for (int k = 0; k < m.n0 * m.n0; ++k) ref *= h * h.conj();
            const CRational got = sisstab::testing::exact_eval(F, q);
            const CRational diff = got - ref;
            const double rel = diff.is_zero() ? 0.0 : sisstab::testing::magnitude(diff) / sisstab::testing::magnitude(ref);
            worst = std::max(worst, rel);

            // the same identity in double precision at a uniform angle
            const auto p = sisstab::testing::random_torus_point(rng, m.L());
            const double h2 = std::norm(evaluate(rp.h, p));
            const cd dref = std::pow(h2, m.n0 * m.n0) * sisstab::testing::fhat(eval_A(m, p));
            worst_double = std::max(worst_double, std::abs(evaluate(F, p) - dref) / std::abs(dref));
        }
    }
    c.expect(worst <= 1e-8, "worst relative error " + num(worst));
    c.notes << "worst relative error " << num(worst, "%.2e") << " exact, " << num(worst_double, "%.2e")
            << " in double precision";
    return c.finish();
}

Outcome simulation_decay() {
    Checker c;
    auto run = [&](const SisModel& m, std::vector<int> sites, const std::vector<std::vector<int>>& ones,
                   const char* name) {
        const auto t0 = std::chrono::steady_clock::now();
        const LiftedSystem ls = lift_finite_system(m, sites);
        std::vector<InitEntry> init;
        for (const auto& s : ones)
            for (int st = 0; st < m.n0; ++st) init.push_back({s, st, 1.0});
        const Trajectory tr = simulate(ls, initial_state(ls, init));
        const double beta = fit_decay_rate(tr);
        const double ratio = tr.norms.back() / tr.norms.front();
        c.expect(beta > 0, std::string(name) + " fitted rate " + num(beta));
        c.expect(ratio < 1e-3, std::string(name) + " norm ratio " + num(ratio));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.expect(secs < 120.0, std::string(name) + " took " + num(secs, "%.1f") + " s");
        if (c.notes.tellp() > 0) c.notes << "; ";
        c.notes << name << ": beta " << num(beta, "%.3f") << ", ratio " << num(ratio, "%.2e");
    };
    // 1-based sites (5,5), (6,5), (6,6) and (5,1), (6,1), (6,2)
    run(sisstab::testing::example1(), {24, 24}, {{4, 4}, {5, 4}, {5, 5}}, "example 1");
    run(sisstab::testing::example2(), {24, 3}, {{4, 0}, {5, 0}, {5, 1}}, "example 2");
    return c.finish();
}

Outcome gram_reconstruction() {
    Checker c;
    sisstab::testing::Rng rng(5);
    double worst = 0.0;
    int cases = 0;
    for (int L = 1; L <= 2; ++L)
        for (int a = 0; a <= 3; ++a)
            for (int b = 0; b <= (L == 2 ? 3 : 0); ++b) {
                GramBasisSpec basis;
                basis.nhat = L == 1 ? DegreeTuple{a} : DegreeTuple{a, b};
                const int n = static_cast<int>(basis.size());
                const Eigen::MatrixXcd G = sisstab::testing::random_hermitian_matrix(rng, n);
                const TrigPoly f = gram_polynomial(G, basis);
                for (int s = 0; s < 50; ++s) {
                    const auto p = sisstab::testing::random_torus_point(rng, L);
                    Eigen::VectorXcd v(n);
                    for (int i = 0; i < n; ++i) {
                        const DegreeTuple e = basis.exponents(static_cast<std::size_t>(i));
                        cd m = 1.0;
                        for (int j = 0; j < L; ++j) m *= std::pow(p[static_cast<std::size_t>(j)], e[static_cast<std::size_t>(j)]);
                        v[i] = m;
                    }
                    worst = std::max(worst, std::abs(evaluate(f, p) - v.dot(G * v)));
                }
                ++cases;
            }
    c.expect(worst <= 1e-10, "worst deviation " + num(worst));
    c.notes << cases << " bases, worst deviation " << num(worst, "%.2e");
    return c.finish();
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "example 1 symbolic pipeline", 1.0, example1_exact},
        {2, "example 1 SOS bound", 10.0, example1_sdp},
        {3, "example 2 Routh table", 5.0, example2_routh},
        {4, "example 2 SOS bound", 30.0, example2_sdp},
        {5, "oracle concordance on 200 random models", 600.0, oracle_concordance},
        {6, "Routh vs Lyapunov on 500 constant systems", 120.0, routh_vs_lyapunov},
        {7, "det(-W) = |h|^(2 n0^2) det(-What) identity", 60.0, fhat_identity},
        {8, "simulation decay", 240.0, simulation_decay},
        {9, "Gram trace reconstruction", 30.0, gram_reconstruction},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.pass && secs > c.limit_s) {
            o.pass = false;
            o.detail = "took " + num(secs, "%.2f") + " s, limit " + num(c.limit_s, "%.0f") + " s";
        }
        failures += !o.pass;
        std::printf("%s [%d] %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
