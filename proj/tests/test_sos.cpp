#include <gtest/gtest.h>

#include <numbers>

#include "sisstab/errors.hpp"
#include "sisstab/sos.hpp"
#include "support/oracles.hpp"

using namespace sisstab;
using sisstab::testing::cd;

namespace {

TrigPoly z(int dims, int var, int power = 1) { return TrigPoly::variable(dims, var, power); }

TrigPoly k(int dims, long num, long den = 1) { return TrigPoly::constant(dims, CRational(Rational(num, den))); }

// p^H G p with p the monomial basis, evaluated directly.
cd direct_gram(const Eigen::MatrixXcd& G, const GramBasisSpec& basis, const std::vector<cd>& z) {
    Eigen::VectorXcd p(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const DegreeTuple e = basis.exponents(i);
        cd v = 1.0;
        for (std::size_t j = 0; j < e.size(); ++j) v *= std::pow(z[j], e[j]);
        p[static_cast<Eigen::Index>(i)] = v;
    }
    return p.dot(G * p);  // conjugates the left factor
}

struct Solved {
    Certificate cert;
    VerificationReport report;
    sdp::SdpStatus status;
};

Solved run(const SosProgram& prog) {
    const auto sol = sdp::solve(prog.problem);
    Solved s{extract_certificate(prog, sol), {}, sol.status};
    s.report = verify_certificate(s.cert, prog.polys, prog.domain);
    return s;
}

}  // namespace

TEST(GramBasis, IndexingIsFirstVariableFastest) {
    const GramBasisSpec b{{2, 1}};
    EXPECT_EQ(b.size(), 6u);
    EXPECT_EQ(b.exponents(0), (DegreeTuple{0, 0}));
    EXPECT_EQ(b.exponents(1), (DegreeTuple{1, 0}));
    EXPECT_EQ(b.exponents(3), (DegreeTuple{0, 1}));
    EXPECT_EQ(b.exponents(5), (DegreeTuple{2, 1}));
}

TEST(Toeplitz, ZeroShiftIsTrace) {
    const Eigen::MatrixXd T = toeplitz_T({0, 0}, {2, 1});
    EXPECT_EQ(T, Eigen::MatrixXd::Identity(6, 6));
    sisstab::testing::Rng rng(40);
    const Eigen::MatrixXcd G = sisstab::testing::random_hermitian_matrix(rng, 6);
    EXPECT_NEAR(std::abs((T.cast<cd>() * G).trace() - G.trace()), 0.0, 1e-14);
}

TEST(Toeplitz, SmallestShift) {
    const Eigen::MatrixXd T = toeplitz_T({1}, {1});
    Eigen::Matrix2d expect;
    expect << 0, 0, 1, 0;
    EXPECT_EQ(T, expect);
    // tr[T G] picks G(0,1), the coefficient of z in p^H G p
    Eigen::Matrix2cd G;
    G << 1.0, cd(2, 3), cd(2, -3), 5.0;
    EXPECT_EQ((T.cast<cd>() * G).trace(), cd(2, 3));
    EXPECT_EQ(gram_polynomial(G, GramBasisSpec{{1}}).coeff({1}), CRational(Rational(2), Rational(3)));
}

TEST(Toeplitz, OutOfRangeThrows) { EXPECT_THROW(toeplitz_T({2}, {1}), Error); }

TEST(Toeplitz, TraceGivesEveryCoefficient) {
    sisstab::testing::Rng rng(41);
    const GramBasisSpec basis{{2, 2}};
    const Eigen::MatrixXcd G = sisstab::testing::random_hermitian_matrix(rng, 9);
    const TrigPoly f = gram_polynomial(G, basis);
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            const cd t = (toeplitz_T({a, b}, {2, 2}).cast<cd>() * G).trace();
            EXPECT_NEAR(std::abs(f.coeff({a, b}).to_complex() - t), 0.0, 1e-14);
        }
}

TEST(Toeplitz, ReconstructionMatchesDirectEvaluation) {
    sisstab::testing::Rng rng(42);
    const GramBasisSpec basis{{2, 2}};
    const Eigen::MatrixXcd G = sisstab::testing::random_hermitian_matrix(rng, 9);
    const TrigPoly f = gram_polynomial(G, basis);
    EXPECT_TRUE(f.is_hermitian());
    for (int s = 0; s < 50; ++s) {
        const auto p = sisstab::testing::random_torus_point(rng, 2);
        EXPECT_NEAR(std::abs(evaluate(f, p) - direct_gram(G, basis, p)), 0.0, 1e-10);
    }
}

TEST(DomainPoly, PeriodOne) {
    const DomainPoly d = domain_poly(1, 0, 1);
    EXPECT_EQ(d.D, k(1, 1, 2) * z(1, 0) + k(1, 1, 2) * z(1, 0, -1) - k(1, 1));
    const std::vector<cd> one{1.0};
    EXPECT_EQ(evaluate(d.D, one).real(), 0.0);
}

TEST(DomainPoly, CubeRootsAreTheZeroSet) {
    const DomainPoly d = domain_poly(2, 1, 3);
    EXPECT_EQ(d.D, k(2, 1, 2) * z(2, 1, 3) + k(2, 1, 2) * z(2, 1, -3) - k(2, 1));
    EXPECT_TRUE(d.D.is_hermitian());
    for (int i = 0; i < 720; ++i) {
        const std::vector<cd> p{1.0, std::polar(1.0, 2.0 * std::numbers::pi * i / 720)};
        const double v = evaluate(d.D, p).real();
        if (i % 240 == 0) EXPECT_NEAR(v, 0.0, 1e-12);
        else EXPECT_LT(v, 0.0);
    }
}

TEST(DomainPoly, GridMembership) {
    for (int N : {1, 2, 3, 5}) {
        const DomainPoly d = domain_poly(1, 0, N);
        const int M = 360 * N;
        for (int i = 0; i < M; ++i) {
            const std::vector<cd> p{std::polar(1.0, 2.0 * std::numbers::pi * i / M)};
            const bool member = evaluate(d.D, p).real() >= -1e-12;
            EXPECT_EQ(member, i % 360 == 0) << "N=" << N << " i=" << i;
        }
    }
}

TEST(DomainPoly, OnePerPeriodicDirection) {
    const auto ds = build_domain_polys(
        {DirectionSpec::infinite(1, 1), DirectionSpec::periodic(3, 1, 1), DirectionSpec::periodic(4, 1, 0)});
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds[0].direction, 1);
    EXPECT_EQ(ds[0].period, 3);
    EXPECT_EQ(ds[1].direction, 2);
    EXPECT_EQ(ds[1].D.dims(), 3);
}

TEST(GlobalSos, Constant) {
    const Solved s = run(assemble_global_sdp(k(2, 7, 2), {0, 0}));
    EXPECT_EQ(s.status, sdp::SdpStatus::Optimal);
    EXPECT_NEAR(s.cert.epsilon, 3.5, 1e-5);
    EXPECT_TRUE(s.report.valid);
}

TEST(GlobalSos, CosineMinimum) {
    const Solved s = run(assemble_global_sdp(z(1, 0) + z(1, 0, -1), {0}));
    EXPECT_EQ(s.status, sdp::SdpStatus::Optimal);
    EXPECT_NEAR(s.cert.epsilon, -2.0, 1e-4);
    EXPECT_TRUE(s.report.valid);
}

TEST(GlobalSos, ComplexCoefficients) {
    // i z - i z^-1 + 3 = 3 - 2 sin(theta), minimum 1
    const TrigPoly f = TrigPoly::monomial(1, {1}, CRational(Rational(0), Rational(1))) +
                       TrigPoly::monomial(1, {-1}, CRational(Rational(0), Rational(-1))) + k(1, 3);
    const SosProgram prog = assemble_global_sdp(f, {0});
    EXPECT_TRUE(prog.complex_gram);
    const Solved s = run(prog);
    EXPECT_NEAR(s.cert.epsilon, 1.0, 1e-4);
    EXPECT_TRUE(s.report.valid);
}

TEST(DomainSos, ConstantWithDomain) {
    const Solved s = run(assemble_domain_sdp({k(1, 5)}, {domain_poly(1, 0, 3)}, {0}));
    EXPECT_NEAR(s.cert.epsilon, 5.0, 1e-5);
    EXPECT_TRUE(s.report.valid);
}

TEST(DomainSos, CubeRootsRaiseTheBound) {
    // (1 - cos t)(cos t + 3/4): 0 on the cube roots of unity, -1/2 at t = pi
    const TrigPoly f = k(1, 1, 4) + k(1, 1, 8) * (z(1, 0) + z(1, 0, -1)) - k(1, 1, 4) * (z(1, 0, 2) + z(1, 0, -2));
    const Solved global = run(assemble_global_sdp(f, {0}));
    EXPECT_NEAR(global.cert.epsilon, -0.5, 1e-4);
    const Solved s = run(assemble_domain_sdp({f}, {domain_poly(1, 0, 3)}, {0}));
    EXPECT_EQ(s.status, sdp::SdpStatus::Optimal);
    EXPECT_NEAR(s.cert.epsilon, 0.0, 1e-4);
    EXPECT_TRUE(s.report.valid);
}

TEST(DomainSos, DegreeLedger) {
    const TrigPoly f = z(2, 0) + z(2, 0, -1) + k(2, 3);
    const SosProgram prog = assemble_domain_sdp({f, f}, {domain_poly(2, 1, 3)}, {0, 0});
    ASSERT_EQ(prog.layout.size(), 4u);
    // n = ceil(max(deg F, deg D)/2) = (1, 2); free term degree 2n, multiplier 2n - deg D
    EXPECT_EQ(prog.layout[0].multiplier, 0);
    EXPECT_EQ(prog.layout[0].basis.nhat, (DegreeTuple{2, 4}));
    EXPECT_EQ(prog.layout[1].multiplier, 1);
    EXPECT_EQ(prog.layout[1].basis.nhat, (DegreeTuple{2, 1}));
    EXPECT_EQ(prog.layout[2].poly, 1);
}

TEST(Verify, RankOneCertificate) {
    // |1 + z|^2 = z^-1 + 2 + z with G = v v^H, v = (1, 1)
    Certificate cert;
    cert.epsilon = 0.0;
    GramBlock g;
    g.basis.nhat = {1};
    g.gram = Eigen::MatrixXcd::Ones(2, 2);
    cert.blocks.push_back(g);
    const TrigPoly f = z(1, 0, -1) + k(1, 2) + z(1, 0);
    const auto rep = verify_certificate(cert, {f}, {});
    EXPECT_TRUE(rep.valid) << rep.message;
    EXPECT_EQ(rep.residual, 0.0);
    EXPECT_GE(rep.min_eig, -1e-12);
    EXPECT_NEAR(rep.lower_bound, 0.0, 1e-12);
}

TEST(Verify, CorruptedEntryIsLocalized) {
    Certificate cert;
    GramBlock g;
    g.basis.nhat = {1};
    g.gram = Eigen::MatrixXcd::Ones(2, 2);
    g.gram(0, 1) += 1e-2;
    g.gram(1, 0) += 1e-2;
    cert.blocks.push_back(g);
    const TrigPoly f = z(1, 0, -1) + k(1, 2) + z(1, 0);
    const auto rep = verify_certificate(cert, {f}, {});
    EXPECT_FALSE(rep.valid);
    EXPECT_NEAR(rep.residual, 1e-2 / 2.0, 1e-12);
    EXPECT_EQ(rep.worst_poly, 0);
    EXPECT_EQ(std::abs(rep.worst_degree[0]), 1);
}

TEST(Verify, NonHermitianRejected) {
    Certificate cert;
    GramBlock g;
    g.basis.nhat = {1};
    g.gram = Eigen::MatrixXcd::Ones(2, 2);
    g.gram(0, 1) = cd(1, 1e-3);
    cert.blocks.push_back(g);
    const TrigPoly f = z(1, 0, -1) + k(1, 2) + z(1, 0);
    EXPECT_FALSE(verify_certificate(cert, {f}, {}).valid);
}

TEST(Verify, IndefiniteGramRejected) {
    Certificate cert;
    cert.epsilon = 0.0;
    GramBlock g;
    g.basis.nhat = {1};
    g.gram.resize(2, 2);
    g.gram << 1.0, 2.0, 2.0, 1.0;  // z^-1*2 + 2 + 2*z, eigenvalues 3 and -1
    cert.blocks.push_back(g);
    const TrigPoly f = k(1, 2) * (z(1, 0, -1) + z(1, 0)) + k(1, 2);
    const auto rep = verify_certificate(cert, {f}, {});
    EXPECT_FALSE(rep.valid);
    EXPECT_NEAR(rep.min_eig, -1.0, 1e-12);
    EXPECT_LT(rep.lower_bound, 0.0);
}

TEST(Verify, ShapeMismatchThrows) {
    Certificate cert;
    GramBlock g;
    g.basis.nhat = {2};
    g.gram = Eigen::MatrixXcd::Ones(2, 2);
    cert.blocks.push_back(g);
    EXPECT_THROW(verify_certificate(cert, {k(1, 1)}, {}), ShapeError);
}

TEST(GridPositivity, Examples) {
    EXPECT_DOUBLE_EQ(finite_grid_positivity({k(2, 5)}, {3, 4}).min_value, 5.0);
    const auto g = finite_grid_positivity({z(1, 0) + z(1, 0, -1)}, {2});
    EXPECT_NEAR(g.min_value, -2.0, 1e-15);
    EXPECT_EQ(g.index, (std::vector<int>{1}));
    EXPECT_NEAR(std::abs(g.point[0] + 1.0), 0.0, 1e-15);
}

TEST(GridPositivity, MatchesBruteForce) {
    sisstab::testing::Rng rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const TrigPoly f = sisstab::testing::random_hermitian(rng, 2, 3, 6);
        double ref = std::numeric_limits<double>::infinity();
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 4; ++b) {
                const std::vector<cd> p{std::polar(1.0, 2 * std::numbers::pi * a / 3),
                                        std::polar(1.0, 2 * std::numbers::pi * b / 4)};
                ref = std::min(ref, evaluate(f, p).real());
            }
        EXPECT_NEAR(finite_grid_positivity({f}, {3, 4}).min_value, ref, 1e-12);
    }
}

TEST(GridPositivity, ResolvesValuesBelowDoubleRounding) {
    // 1e10 (z^-2 + z^-1 + 1 + z + z^2) vanishes at the primitive fifth roots of unity
    TrigPoly f = k(1, 1, 10000000);
    for (int e = -2; e <= 2; ++e) f += k(1, 10000000000) * z(1, 0, e);
    const auto g = finite_grid_positivity({f}, {5});
    EXPECT_NEAR(g.min_value, 1e-7, 1e-15);
    EXPECT_LT(g.error_bound, 1e-30);
    EXPECT_NE(g.index[0], 0);
    EXPECT_EQ(finite_grid_positivity({k(1, 3) * z(1, 0, 7) + k(1, 3) * z(1, 0, -7)}, {7}).min_value, 6.0);
}

TEST(CertificateJson, RoundTripIsExact) {
    sisstab::testing::Rng rng(44);
    Certificate cert;
    cert.epsilon = 3.375 + 1e-9;
    cert.model_hash = "0123456789abcdef";
    for (int b = 0; b < 3; ++b) {
        GramBlock g;
        g.poly = b / 2;
        g.multiplier = b % 2;
        g.basis.nhat = {1, 1};
        g.gram = sisstab::testing::random_hermitian_matrix(rng, 4);
        cert.blocks.push_back(g);
    }
    const std::string text = certificate_to_json(cert);
    const Certificate back = certificate_from_json(text);
    EXPECT_EQ(back.epsilon, cert.epsilon);
    EXPECT_EQ(back.model_hash, cert.model_hash);
    ASSERT_EQ(back.blocks.size(), 3u);
    for (std::size_t b = 0; b < 3; ++b) {
        EXPECT_EQ(back.blocks[b].gram, cert.blocks[b].gram);
        EXPECT_EQ(back.blocks[b].poly, cert.blocks[b].poly);
        EXPECT_EQ(back.blocks[b].multiplier, cert.blocks[b].multiplier);
        EXPECT_EQ(back.blocks[b].basis.nhat, cert.blocks[b].basis.nhat);
    }
    EXPECT_EQ(certificate_to_json(back), text);
}

TEST(CertificateJson, BadInputThrows) {
    EXPECT_THROW(certificate_from_json("{"), ParseError);
    EXPECT_THROW(certificate_from_json(R"({"epsilon": "x", "blocks": []})"), Error);
}
