#include "sisstab/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>

#include "sisstab/errors.hpp"

namespace sisstab {

namespace {

using Cd = std::complex<double>;

// Kronecker-form solve is used up to this size, Bartels-Stewart above it.
constexpr Eigen::Index kDenseLyapunovMax = 8;

bool positive_definite(const Eigen::MatrixXcd& P) {
    if (!P.allFinite()) return false;
    const Eigen::MatrixXcd herm = 0.5 * (P + P.adjoint());
    const double scale = std::max(1.0, herm.cwiseAbs().maxCoeff());
    const Eigen::Index n = herm.rows();
    Eigen::LLT<Eigen::MatrixXcd> llt(herm - 1e-12 * scale * Eigen::MatrixXcd::Identity(n, n));
    return llt.info() == Eigen::Success;
}

bool lyapunov_dense(const Eigen::MatrixXcd& M) {
    const Eigen::Index n = M.rows();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd Mh = M.adjoint();
    const Eigen::MatrixXcd Mt = M.transpose();
    // column-major vec: vec(M^H P) = (I kron M^H) vec P, vec(P M) = (M^T kron I) vec P
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            K.block(i * n, j * n, n, n) += I(i, j) * Mh;
            K.block(i * n, j * n, n, n) += Mt(i, j) * I;
        }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(K);
    if (!(lu.rcond() > 1e-14)) return false;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i) rhs(i * n + i) = -1.0;
    const Eigen::VectorXcd p = lu.solve(rhs);
    return positive_definite(Eigen::Map<const Eigen::MatrixXcd>(p.data(), n, n));
}

// Solves T^H X + X T = -I for upper-triangular T (the Schur form).
bool lyapunov_triangular(const Eigen::MatrixXcd& T, Eigen::MatrixXcd& X) {
    const Eigen::Index n = T.rows();
    X = Eigen::MatrixXcd::Zero(n, n);
    const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            Cd acc = (i == j) ? Cd(-1.0) : Cd(0.0);
            for (Eigen::Index k = 0; k < i; ++k) acc -= std::conj(T(k, i)) * X(k, j);
            for (Eigen::Index k = 0; k < j; ++k) acc -= X(i, k) * T(k, j);
            const Cd denom = std::conj(T(i, i)) + T(j, j);
            if (std::abs(denom) < 1e-14 * scale) return false;
            X(i, j) = acc / denom;
        }
    }
    return true;
}

bool lyapunov_schur(const Eigen::ComplexSchur<Eigen::MatrixXcd>& schur, double shift) {
    Eigen::MatrixXcd T = schur.matrixT();
    T.diagonal().array() -= shift;
    Eigen::MatrixXcd X;
    if (!lyapunov_triangular(T, X)) return false;
    const Eigen::MatrixXcd& U = schur.matrixU();
    return positive_definite(U * X * U.adjoint());
}

}  // namespace

bool hurwitz_lyapunov(const Eigen::MatrixXcd& M) {
    if (M.rows() != M.cols()) throw DimensionMismatch("Hurwitz test needs a square matrix");
    if (M.rows() == 0) return true;
    if (!M.allFinite()) return false;
    if (M.rows() <= kDenseLyapunovMax) return lyapunov_dense(M);
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(M);
    if (schur.info() != Eigen::Success) return false;
    return lyapunov_schur(schur, 0.0);
}

double spectral_abscissa(const Eigen::MatrixXcd& M, double tol) {
    if (M.rows() != M.cols()) throw DimensionMismatch("spectral abscissa needs a square matrix");
    if (M.rows() == 0) return -std::numeric_limits<double>::infinity();
    if (!(tol > 0)) throw Error("tolerance must be positive");
    const double bound = M.norm() + 1.0;
    double lo = -bound;  // M - lo I is not Hurwitz
    double hi = bound;   // M - hi I is Hurwitz
    const Eigen::Index n = M.rows();
    if (n <= kDenseLyapunovMax) {
        const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (hurwitz_lyapunov(M - mid * I)) hi = mid;
            else lo = mid;
        }
    } else {
        Eigen::ComplexSchur<Eigen::MatrixXcd> schur(M);
        if (schur.info() != Eigen::Success) throw Error("Schur decomposition failed");
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (lyapunov_schur(schur, mid)) hi = mid;
            else lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<int> sample_counts(const SisModel& m, const std::vector<int>& grid, int fallback) {
    if (!grid.empty() && static_cast<int>(grid.size()) != m.L())
        throw DimensionMismatch("grid needs one count per direction");
    std::vector<int> counts;
    for (int i = 0; i < m.L(); ++i) {
        const auto& d = m.directions[static_cast<std::size_t>(i)];
        if (d.kind == DirectionKind::Finite) throw UnsupportedError("finite-extent directions are not supported");
        if (d.kind == DirectionKind::Periodic) counts.push_back(d.period);
        else counts.push_back(grid.empty() ? fallback : grid[static_cast<std::size_t>(i)]);
    }
    return counts;
}

SampleResult freq_sample_abscissa(const SisModel& m, const std::vector<int>& grid, double tol) {
    m.validate();
    SampleResult out;
    out.max_abscissa = -std::numeric_limits<double>::infinity();
    for (const auto& z : torus_grid(sample_counts(m, grid))) {
        const double a = spectral_abscissa(eval_A(m, z), tol);
        ++out.points;
        if (a > out.max_abscissa) {
            out.max_abscissa = a;
            out.argmax = z;
        }
    }
    return out;
}

std::size_t LiftedSystem::num_sites() const {
    std::size_t s = 1;
    for (int c : sites) s *= static_cast<std::size_t>(c);
    return s;
}

std::size_t LiftedSystem::site_offset(const std::vector<int>& k) const {
    if (k.size() != sites.size()) throw DimensionMismatch("site index has the wrong length");
    std::size_t idx = 0;
    for (std::size_t i = sites.size(); i-- > 0;) {
        if (k[i] < 0 || k[i] >= sites[i]) throw Error("site index out of range");
        idx = idx * static_cast<std::size_t>(sites[i]) + static_cast<std::size_t>(k[i]);
    }
    return idx * static_cast<std::size_t>(n0);
}

std::vector<int> LiftedSystem::site_coords(std::size_t site) const {
    std::vector<int> k(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        k[i] = static_cast<int>(site % static_cast<std::size_t>(sites[i]));
        site /= static_cast<std::size_t>(sites[i]);
    }
    return k;
}

LiftedSystem lift_finite_system(const SisModel& m, const std::vector<int>& sites) {
    m.validate();
    if (static_cast<int>(sites.size()) != m.L()) throw DimensionMismatch("need one site count per direction");
    for (int i = 0; i < m.L(); ++i) {
        const auto& d = m.directions[static_cast<std::size_t>(i)];
        if (sites[static_cast<std::size_t>(i)] < 1) throw Error("site counts must be positive");
        if (d.kind == DirectionKind::Finite) throw UnsupportedError("finite-extent directions are not supported");
        if (d.kind == DirectionKind::Periodic && sites[static_cast<std::size_t>(i)] != d.period)
            throw Error("periodic direction " + std::to_string(i + 1) + " must use " + std::to_string(d.period) +
                        " sites");
    }
    LiftedSystem ls;
    ls.sites = sites;
    ls.n0 = m.n0;
    const auto S = static_cast<Eigen::Index>(ls.num_sites());
    const Eigen::Index n = m.n();
    const Eigen::Index n0 = m.n0;

    // Delta_big - I kron A_SS on the channel vector, site-major.
    std::vector<Eigen::Triplet<double>> trip;
    const Eigen::MatrixXd Ass = m.A_SS.to_eigen();
    for (Eigen::Index s = 0; s < S; ++s) {
        const auto k = ls.site_coords(static_cast<std::size_t>(s));
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c)
                if (Ass(r, c) != 0.0) trip.emplace_back(s * n + r, s * n + c, -Ass(r, c));
        Eigen::Index row = 0;
        for (int i = 0; i < m.L(); ++i) {
            const auto& d = m.directions[static_cast<std::size_t>(i)];
            const int N = sites[static_cast<std::size_t>(i)];
            auto fwd = k;
            fwd[static_cast<std::size_t>(i)] = (k[static_cast<std::size_t>(i)] + 1) % N;
            auto bwd = k;
            bwd[static_cast<std::size_t>(i)] = (k[static_cast<std::size_t>(i)] + N - 1) % N;
            const auto sf = static_cast<Eigen::Index>(ls.site_offset(fwd) / static_cast<std::size_t>(n0));
            const auto sb = static_cast<Eigen::Index>(ls.site_offset(bwd) / static_cast<std::size_t>(n0));
            for (int c = 0; c < d.n_pos; ++c, ++row) trip.emplace_back(s * n + row, sf * n + row, 1.0);
            for (int c = 0; c < d.n_neg; ++c, ++row) trip.emplace_back(s * n + row, sb * n + row, 1.0);
        }
    }
    Eigen::SparseMatrix<double> shifted(S * n, S * n);
    shifted.setFromTriplets(trip.begin(), trip.end());
    shifted.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success)
        throw WellPosednessError("Delta_big - I kron A_SS is singular on this ring");

    const Eigen::MatrixXd Ast = m.A_ST.to_eigen();
    const Eigen::MatrixXd Ats = m.A_TS.to_eigen();
    const Eigen::MatrixXd Att = m.A_TT.to_eigen();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(S * n, S * n0);
    for (Eigen::Index s = 0; s < S; ++s) rhs.block(s * n, s * n0, n, n0) = Ast;
    const Eigen::MatrixXd X = lu.solve(rhs);
    if (!X.allFinite()) throw WellPosednessError("Delta_big - I kron A_SS is singular on this ring");

    std::vector<Eigen::Triplet<double>> out;
    for (Eigen::Index s = 0; s < S; ++s) {
        const Eigen::MatrixXd rows = Ats * X.middleRows(s * n, n);
        for (Eigen::Index r = 0; r < n0; ++r) {
            for (Eigen::Index c = 0; c < S * n0; ++c) {
                double v = rows(r, c);
                if (c / n0 == s) v += Att(r, c % n0);
                if (v != 0.0) out.emplace_back(s * n0 + r, c, v);
            }
        }
    }
    ls.Abig.resize(S * n0, S * n0);
    ls.Abig.setFromTriplets(out.begin(), out.end());
    ls.Abig.makeCompressed();
    return ls;
}

Trajectory simulate(const LiftedSystem& ls, const Eigen::VectorXd& x0, const SimulationOptions& opts) {
    if (!(opts.dt > 0)) throw Error("dt must be positive");
    if (!(opts.t_end >= opts.dt)) throw Error("t_end must be at least dt");
    if (x0.size() != ls.Abig.rows()) throw DimensionMismatch("initial state has the wrong size");
    const auto steps = static_cast<long>(std::llround(opts.t_end / opts.dt));

    std::vector<long> record;
    for (double t : opts.sample_times) {
        if (t < 0 || t > opts.t_end + 0.5 * opts.dt) throw Error("sample time outside [0, t_end]");
        record.push_back(std::lround(t / opts.dt));
    }

    Trajectory tr;
    Eigen::VectorXd x = x0;
    auto maybe_record = [&](long step) {
        for (std::size_t i = 0; i < record.size(); ++i) {
            if (record[i] != step) continue;
            tr.times.push_back(opts.sample_times[i]);
            tr.states.push_back(x);
            tr.norms.push_back(x.norm());
        }
    };
    maybe_record(0);
    const double h = opts.dt;
    for (long step = 1; step <= steps; ++step) {
        const Eigen::VectorXd k1 = ls.Abig * x;
        const Eigen::VectorXd k2 = ls.Abig * (x + 0.5 * h * k1);
        const Eigen::VectorXd k3 = ls.Abig * (x + 0.5 * h * k2);
        const Eigen::VectorXd k4 = ls.Abig * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double nx = x.norm();
        if (!(nx <= opts.blowup))
            throw Error("simulation diverged at t = " + std::to_string(static_cast<double>(step) * h) + " s");
        maybe_record(step);
    }
    return tr;
}

Eigen::VectorXd initial_state(const LiftedSystem& ls, const std::vector<InitEntry>& entries) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(ls.Abig.rows());
    for (const auto& e : entries) {
        if (e.state < 0 || e.state >= ls.n0) throw Error("state index out of range");
        x(static_cast<Eigen::Index>(ls.site_offset(e.site)) + e.state) = e.value;
    }
    return x;
}

double fit_decay_rate(const Trajectory& tr) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        if (!(tr.norms[i] > 0)) continue;
        const double t = tr.times[i];
        const double y = std::log(tr.norms[i]);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++cnt;
    }
    if (cnt < 2) throw Error("need at least two nonzero samples to fit a rate");
    const double den = cnt * stt - st * st;
    if (den == 0) throw Error("sample times must differ");
    return -(cnt * sty - st * sy) / den;
}

std::string trajectory_csv(const LiftedSystem& ls, const Trajectory& tr) {
    std::ostringstream os;
    os << "time";
    for (std::size_t i = 0; i < ls.sites.size(); ++i) os << ",k" << i + 1;
    for (int s = 0; s < ls.n0; ++s) os << ",x" << s + 1;
    os << '\n';
    char buf[64];
    for (std::size_t t = 0; t < tr.times.size(); ++t) {
        for (std::size_t site = 0; site < ls.num_sites(); ++site) {
            std::snprintf(buf, sizeof buf, "%.10g", tr.times[t]);
            os << buf;
            for (int k : ls.site_coords(site)) os << ',' << k + 1;
            const auto off = static_cast<Eigen::Index>(site) * ls.n0;
            for (int s = 0; s < ls.n0; ++s) {
                std::snprintf(buf, sizeof buf, "%.10g", tr.states[t](off + s));
                os << ',' << buf;
            }
            os << '\n';
        }
    }
    return os.str();
}

}  // namespace sisstab
