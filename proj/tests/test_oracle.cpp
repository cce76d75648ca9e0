#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "sisstab/errors.hpp"
#include "sisstab/oracle.hpp"
#include "support/examples.hpp"
#include "support/oracles.hpp"

using namespace sisstab;
using sisstab::testing::cd;

namespace {

// Coefficients of det(sI - M), highest power first, by Faddeev-LeVerrier.
std::vector<double> char_poly(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    std::vector<double> c(static_cast<std::size_t>(n + 1));
    c[0] = 1.0;
    Eigen::MatrixXd Mk = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k <= n; ++k) {
        Mk = M * Mk + c[static_cast<std::size_t>(k - 1)] * Eigen::MatrixXd::Identity(n, n);
        c[static_cast<std::size_t>(k)] = -(M * Mk).trace() / k;
    }
    return c;
}

// Coefficients of p(s + a).
std::vector<double> taylor_shift(std::vector<double> c, double a) {
    const std::size_t n = c.size() - 1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 1; j + i <= n; ++j) c[j] += a * c[j - 1];
    return c;
}

// Classical Routh array on real coefficients; any zero or sign change in the
// first column means not Hurwitz.
bool routh_hurwitz(const std::vector<double>& c) {
    const std::size_t n = c.size() - 1;
    std::vector<double> r0, r1;
    for (std::size_t i = 0; i <= n; i += 2) r0.push_back(c[i]);
    for (std::size_t i = 1; i <= n; i += 2) r1.push_back(c[i]);
    for (std::size_t row = 1; row <= n; ++row) {
        if (r1.empty() || r1[0] <= 0.0) return false;
        std::vector<double> next;
        for (std::size_t j = 0; j + 1 < r0.size(); ++j) {
            const double b = j + 1 < r1.size() ? r1[j + 1] : 0.0;
            next.push_back((r1[0] * r0[j + 1] - r0[0] * b) / r1[0]);
        }
        r0 = r1;
        r1 = next;
    }
    return r0[0] > 0.0;
}

double char_poly_abscissa(const Eigen::MatrixXd& M) {
    const auto c = char_poly(M);
    double lo = -M.norm() - 1.0, hi = M.norm() + 1.0;
    while (hi - lo > 1e-11) {
        const double mid = 0.5 * (lo + hi);
        (routh_hurwitz(taylor_shift(c, mid)) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

SisModel example1_flipped() {
    SisModel m = sisstab::testing::example1();
    for (auto& v : m.A_TT.data) v = -v;
    return m;
}

}  // namespace

TEST(Hurwitz, Basics) {
    EXPECT_TRUE(hurwitz_lyapunov(-Eigen::MatrixXcd::Identity(3, 3)));
    Eigen::MatrixXcd rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    EXPECT_FALSE(hurwitz_lyapunov(rot));
    EXPECT_TRUE(hurwitz_lyapunov(eval_A_at_one(sisstab::testing::example1())));
    EXPECT_FALSE(hurwitz_lyapunov(Eigen::MatrixXcd::Identity(2, 2)));
}

TEST(Hurwitz, LargeMatricesUseSchurPath) {
    sisstab::testing::Rng rng(50);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 9 + trial % 6;
        const Eigen::MatrixXcd m = sisstab::testing::random_complex_matrix(rng, n);
        const double a = sisstab::testing::max_real_eig(m);
        if (std::abs(a) < 1e-6) continue;
        EXPECT_EQ(hurwitz_lyapunov(m - cd(1e-3) * Eigen::MatrixXcd::Identity(n, n)), a < 1e-3);
    }
}

TEST(SpectralAbscissa, Basics) {
    const Eigen::MatrixXcd d = Eigen::Vector2cd(-1.0, -3.0).asDiagonal();
    EXPECT_NEAR(spectral_abscissa(d), -1.0, 1e-8);
    Eigen::MatrixXcd rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    EXPECT_NEAR(spectral_abscissa(rot), 0.0, 1e-8);
}

TEST(SpectralAbscissa, MatchesCharPolyBracketing) {
    sisstab::testing::Rng rng(51);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::MatrixXd m(4, 4);
        for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = sisstab::testing::uniform(rng, -1.0, 1.0);
        const double ref = char_poly_abscissa(m);
        EXPECT_NEAR(spectral_abscissa(m.cast<cd>(), 1e-8), ref, 2e-8) << "trial " << trial;
    }
}

TEST(SpectralAbscissa, ConsistentWithLyapunov) {
    sisstab::testing::Rng rng(52);
    int disagreements = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + trial % 5;
        const Eigen::MatrixXcd m = sisstab::testing::random_complex_matrix(rng, n) -
                                   cd(sisstab::testing::uniform(rng, 0.0, 1.5)) * Eigen::MatrixXcd::Identity(n, n);
        if (hurwitz_lyapunov(m) != (spectral_abscissa(m, 1e-8) < 0.0)) ++disagreements;
    }
    EXPECT_EQ(disagreements, 0);
}

TEST(FrequencySampling, ExamplesAreStable) {
    const auto r1 = freq_sample_abscissa(sisstab::testing::example1(), {64, 64});
    EXPECT_LT(r1.max_abscissa, 0.0);
    EXPECT_EQ(r1.points, 64u * 64u);
    const auto r2 = freq_sample_abscissa(sisstab::testing::example2(), {64, 64});
    EXPECT_LT(r2.max_abscissa, 0.0);
    EXPECT_EQ(r2.points, 64u * 3u);
}

TEST(FrequencySampling, FlippedExampleIsUnstable) {
    const auto r = freq_sample_abscissa(example1_flipped(), {64, 64});
    EXPECT_GT(r.max_abscissa, 0.0);
    ASSERT_EQ(r.argmax.size(), 2u);
    EXPECT_NEAR(spectral_abscissa(eval_A(example1_flipped(), r.argmax)), r.max_abscissa, 1e-7);
}

TEST(FrequencySampling, SampleCounts) {
    EXPECT_EQ(sample_counts(sisstab::testing::example2(), {}), (std::vector<int>{32, 3}));
    EXPECT_EQ(sample_counts(sisstab::testing::example2(), {10, 64}), (std::vector<int>{10, 3}));
}

TEST(FrequencySampling, SingularPointReported) {
    SisModel m = sisstab::testing::example1();
    m.A_SS.at(0, 0) = Rational(1);
    EXPECT_THROW(freq_sample_abscissa(m, {4, 4}), WellPosednessError);
}

TEST(Lift, SingleSiteIsAAtOne) {
    for (const SisModel& m : {sisstab::testing::example1(), sisstab::testing::example2()}) {
        SisModel one = m;
        for (auto& d : one.directions) d = DirectionSpec::infinite(d.n_pos, d.n_neg);
        const LiftedSystem ls = lift_finite_system(one, {1, 1});
        EXPECT_LT((ls.dense().cast<cd>() - eval_A_at_one(one)).norm(), 1e-14);
    }
}

TEST(Lift, SiteIndexing) {
    const LiftedSystem ls = lift_finite_system(sisstab::testing::example2(), {5, 3});
    EXPECT_EQ(ls.num_sites(), 15u);
    EXPECT_EQ(ls.Abig.rows(), 30);
    EXPECT_EQ(ls.site_offset({2, 1}), static_cast<std::size_t>(2 * (2 + 5 * 1)));
    EXPECT_EQ(ls.site_coords(7), (std::vector<int>{2, 1}));
}

TEST(Lift, PeriodMustMatch) {
    EXPECT_THROW(lift_finite_system(sisstab::testing::example2(), {5, 4}), Error);
}

TEST(Lift, RingMatchesSampling) {
    const SisModel m = sisstab::testing::example2();
    const LiftedSystem ls = lift_finite_system(m, {24, 3});
    const double lifted = spectral_abscissa(ls.dense().cast<cd>());
    const double sampled = freq_sample_abscissa(m, {24, 3}).max_abscissa;
    EXPECT_NEAR(lifted, sampled, 1e-6);
}

TEST(Lift, ExampleOneRingIsStable) {
    const LiftedSystem ls = lift_finite_system(sisstab::testing::example1(), {8, 8});
    EXPECT_LT(spectral_abscissa(ls.dense().cast<cd>()), 0.0);
}

TEST(Lift, CirculantSpectrumIsUnionOverRoots) {
    SisModel m = sisstab::testing::example2();
    m.directions[0] = DirectionSpec::periodic(4, 1, 1);
    const LiftedSystem ls = lift_finite_system(m, {4, 3});
    Eigen::EigenSolver<Eigen::MatrixXd> es(ls.dense(), false);
    std::vector<double> big;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) big.push_back(es.eigenvalues()[i].real());

    std::vector<double> union_re;
    for (const auto& z : torus_grid({4, 3})) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ce(eval_A(m, z), false);
        for (Eigen::Index i = 0; i < ce.eigenvalues().size(); ++i) union_re.push_back(ce.eigenvalues()[i].real());
    }
    std::sort(big.begin(), big.end());
    std::sort(union_re.begin(), union_re.end());
    ASSERT_EQ(big.size(), union_re.size());
    for (std::size_t i = 0; i < big.size(); ++i) EXPECT_NEAR(big[i], union_re[i], 1e-6);
}

TEST(Simulate, ZeroStateStaysZero) {
    const LiftedSystem ls = lift_finite_system(sisstab::testing::example1(), {6, 6});
    const auto tr = simulate(ls, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ls.Abig.rows())));
    ASSERT_EQ(tr.times.size(), 4u);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        EXPECT_EQ(tr.norms[i], 0.0);
        EXPECT_EQ(tr.states[i].norm(), 0.0);
    }
}

TEST(Simulate, ExampleOneDecays) {
    const LiftedSystem ls = lift_finite_system(sisstab::testing::example1(), {8, 8});
    std::vector<InitEntry> init;
    for (const auto& site : std::vector<std::vector<int>>{{4, 4}, {5, 4}, {5, 5}})
        for (int s = 0; s < 2; ++s) init.push_back({site, s, 1.0});
    const auto tr = simulate(ls, initial_state(ls, init));
    EXPECT_DOUBLE_EQ(tr.times.back(), 20.0);
    EXPECT_NEAR(tr.norms.front(), std::sqrt(6.0), 1e-15);
    EXPECT_LT(tr.norms.back() / tr.norms.front(), 1e-3);
    for (std::size_t i = 1; i < tr.norms.size(); ++i) EXPECT_LT(tr.norms[i], tr.norms[i - 1]);
    EXPECT_GT(fit_decay_rate(tr), 0.0);
    for (std::size_t i = 0; i < tr.norms.size(); ++i) EXPECT_NEAR(tr.norms[i], tr.states[i].norm(), 1e-12);
}

TEST(Simulate, MatchesMatrixExponential) {
    Eigen::MatrixXd a(2, 2);
    a << -1.0, 0.0, 0.0, -2.0;
    LiftedSystem ls;
    ls.sites = {1};
    ls.n0 = 2;
    ls.Abig = a.sparseView();
    SimulationOptions o;
    o.t_end = 1.0;
    o.sample_times = {0.0, 1.0};
    const auto tr = simulate(ls, Eigen::Vector2d(1.0, 1.0), o);
    EXPECT_NEAR(tr.states.back()[0], std::exp(-1.0), 1e-10);
    EXPECT_NEAR(tr.states.back()[1], std::exp(-2.0), 1e-10);
}

TEST(Simulate, BlowupThrows) {
    LiftedSystem ls;
    ls.sites = {1};
    ls.n0 = 1;
    Eigen::MatrixXd a(1, 1);
    a << 5.0;
    ls.Abig = a.sparseView();
    SimulationOptions o;
    o.t_end = 20.0;
    o.sample_times = {20.0};
    EXPECT_THROW(simulate(ls, Eigen::VectorXd::Ones(1), o), Error);
}

TEST(Simulate, DecayRateOfExponential) {
    Trajectory tr;
    for (double t : {0.0, 1.0, 2.0, 5.0}) {
        tr.times.push_back(t);
        tr.norms.push_back(3.0 * std::exp(-0.7 * t));
    }
    EXPECT_NEAR(fit_decay_rate(tr), 0.7, 1e-12);
}

TEST(Simulate, CsvLayout) {
    const LiftedSystem ls = lift_finite_system(sisstab::testing::example2(), {2, 3});
    SimulationOptions o;
    o.t_end = 0.01;
    o.dt = 0.01;
    o.sample_times = {0.0};
    const auto tr = simulate(ls, initial_state(ls, {{{1, 2}, 1, 2.5}}), o);
    const std::string csv = trajectory_csv(ls, tr);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,k1,k2,x1,x2");
    EXPECT_NE(csv.find("0,2,3,0,2.5"), std::string::npos);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}
