#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <tuple>

#include "sdp_detail.hpp"
#include "sisstab/errors.hpp"

namespace sisstab::sdp::detail {

namespace {

constexpr int kMaxNewtonSteps = 500;

// Entry of a symmetric coefficient matrix: A(r,c) = A(c,r) = v, r <= c.
struct SymEntry {
    int r;
    int c;
    double v;
};

struct Row {
    std::vector<std::pair<int, std::vector<SymEntry>>> parts;  // (block, entries)
    std::vector<std::pair<int, double>> free;

    double norm_sq() const {
        double s = 0.0;
        for (const auto& [b, es] : parts)
            for (const auto& e : es) s += (e.r == e.c ? 1.0 : 2.0) * e.v * e.v;
        for (const auto& [k, v] : free) s += v * v;
        return s;
    }
    void scale(double f) {
        for (auto& [b, es] : parts)
            for (auto& e : es) e.v *= f;
        for (auto& [k, v] : free) v *= f;
    }
};

Row to_row(const LinearFunctional& f) {
    std::map<std::tuple<int, int, int>, double> acc;
    for (const auto& e : f.entries) {
        const int r = std::min(e.row, e.col), c = std::max(e.row, e.col);
        acc[{e.block, r, c}] += r == c ? e.value : 0.5 * e.value;
    }
    std::map<int, double> free;
    for (const auto& [k, v] : f.free_terms) free[k] += v;

    Row row;
    for (const auto& [key, v] : acc) {
        if (v == 0.0) continue;
        const auto [b, r, c] = key;
        if (row.parts.empty() || row.parts.back().first != b) row.parts.push_back({b, {}});
        row.parts.back().second.push_back({r, c, v});
    }
    for (const auto& [k, v] : free)
        if (v != 0.0) row.free.emplace_back(k, v);
    return row;
}

double inner(const std::vector<SymEntry>& es, const Eigen::MatrixXd& W) {
    double s = 0.0;
    for (const auto& e : es) s += e.r == e.c ? e.v * W(e.r, e.r) : e.v * (W(e.r, e.c) + W(e.c, e.r));
    return s;
}

void accumulate(Eigen::MatrixXd& M, const std::vector<SymEntry>& es, double f) {
    for (const auto& e : es) {
        M(e.r, e.c) += f * e.v;
        if (e.r != e.c) M(e.c, e.r) += f * e.v;
    }
}

using Blocks = std::vector<Eigen::MatrixXd>;

double dot(const Blocks& a, const Blocks& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
    return s;
}

double norm(const Blocks& a) { return std::sqrt(dot(a, a)); }

Eigen::MatrixXd sym(const Eigen::MatrixXd& M) { return 0.5 * (M + M.transpose()); }

// Largest step in (0, inf] keeping X + a*D PSD; X must be positive definite.
double max_step(const Eigen::MatrixXd& X, const Eigen::MatrixXd& D) {
    Eigen::LLT<Eigen::MatrixXd> llt(X);
    if (llt.info() != Eigen::Success) return 0.0;
    Eigen::MatrixXd Z = llt.matrixL().solve(D);
    Z = llt.matrixL().solve(Z.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(Z), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

class Interior {
public:
    Interior(const SdpProblem& p, const SdpOptions& opts) : opts_(opts), dims_(p.block_dims), nf_(p.free_vars) {
        for (const auto& c : p.constraints) {
            Row row = to_row(c.lhs);
            const double nrm = std::sqrt(row.norm_sq());
            if (nrm == 0.0) {
                if (c.rhs != 0.0) throw Error("constraint reads 0 = nonzero");
                continue;
            }
            row.scale(1.0 / nrm);
            rows_.push_back(std::move(row));
            rhs_.push_back(c.rhs / nrm);
        }
        m_ = static_cast<Eigen::Index>(rows_.size());
        b_ = Eigen::Map<Eigen::VectorXd>(rhs_.data(), m_);

        // minimize <C, X> + cf . xf, the negated objective
        const Row obj = to_row(p.objective);
        for (int d : dims_) C_.push_back(Eigen::MatrixXd::Zero(d, d));
        cf_ = Eigen::VectorXd::Zero(nf_);
        for (const auto& [b, es] : obj.parts) accumulate(C_[static_cast<std::size_t>(b)], es, -1.0);
        for (const auto& [k, v] : obj.free) cf_[k] -= v;

        sigma_b_ = std::max(1.0, b_.lpNorm<Eigen::Infinity>());
        double cmax = cf_.size() ? cf_.lpNorm<Eigen::Infinity>() : 0.0;
        for (const auto& Ck : C_) cmax = std::max(cmax, Ck.cwiseAbs().maxCoeff());
        sigma_c_ = std::max(1.0, cmax);
        b_ /= sigma_b_;
        cf_ /= sigma_c_;
        for (auto& Ck : C_) Ck /= sigma_c_;

        by_block_.resize(dims_.size());
        for (Eigen::Index i = 0; i < m_; ++i)
            for (const auto& [b, es] : rows_[static_cast<std::size_t>(i)].parts)
                by_block_[static_cast<std::size_t>(b)].push_back({i, &es});
        Af_ = Eigen::MatrixXd::Zero(m_, nf_);
        for (Eigen::Index i = 0; i < m_; ++i)
            for (const auto& [k, v] : rows_[static_cast<std::size_t>(i)].free) Af_(i, k) += v;
    }

    SdpSolution run();

private:
    struct Part {
        Eigen::Index row;
        const std::vector<SymEntry>* entries;
    };

    Eigen::VectorXd apply_A(const Blocks& X, const Eigen::VectorXd& xf) const {
        Eigen::VectorXd out = Af_ * xf;
        for (std::size_t k = 0; k < dims_.size(); ++k)
            for (const auto& part : by_block_[k]) out[part.row] += inner(*part.entries, X[k]);
        return out;
    }

    Blocks apply_At(const Eigen::VectorXd& y) const {
        Blocks out;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            out.push_back(Eigen::MatrixXd::Zero(dims_[k], dims_[k]));
            for (const auto& part : by_block_[k]) accumulate(out[k], *part.entries, y[part.row]);
        }
        return out;
    }

    // M(i,j) = <A_i, X A_j S^-1>
    Eigen::MatrixXd schur(const Blocks& X, const Blocks& Sinv) const {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m_, m_);
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const int n = dims_[k];
            Eigen::MatrixXd G(n, n);
            for (const auto& pj : by_block_[k]) {
                G.setZero();
                for (const auto& e : *pj.entries) {
                    G.noalias() += e.v * X[k].col(e.r) * Sinv[k].row(e.c);
                    if (e.r != e.c) G.noalias() += e.v * X[k].col(e.c) * Sinv[k].row(e.r);
                }
                for (const auto& pi : by_block_[k]) M(pi.row, pj.row) += inner(*pi.entries, G);
            }
        }
        return 0.5 * (M + M.transpose());
    }

    const SdpOptions& opts_;
    std::vector<int> dims_;
    int nf_;
    std::vector<Row> rows_;
    std::vector<double> rhs_;
    std::vector<std::vector<Part>> by_block_;
    Eigen::Index m_ = 0;
    Eigen::VectorXd b_;
    Eigen::MatrixXd Af_;
    Blocks C_;
    Eigen::VectorXd cf_;
    double sigma_b_ = 1.0;
    double sigma_c_ = 1.0;
};

SdpSolution Interior::run() {
    const std::size_t nb = dims_.size();
    double N = 0.0;
    for (int d : dims_) N += d;

    std::mt19937_64 rng(opts_.seed);
    std::uniform_real_distribution<double> jitter(0.99, 1.01);
    Blocks X, S;
    for (std::size_t k = 0; k < nb; ++k) {
        const double n = dims_[k];
        double cnorm = C_[k].norm();
        for (const auto& part : by_block_[k]) cnorm = std::max(cnorm, std::sqrt(Row{{{0, *part.entries}}, {}}.norm_sq()));
        const double xi = std::max({10.0, std::sqrt(n), n * (1.0 + b_.lpNorm<Eigen::Infinity>())});
        const double eta = std::max({10.0, std::sqrt(n), cnorm});
        const double f = opts_.seed != 0 ? jitter(rng) : 1.0;
        X.push_back(f * xi * Eigen::MatrixXd::Identity(dims_[k], dims_[k]));
        S.push_back(eta * Eigen::MatrixXd::Identity(dims_[k], dims_[k]));
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    Eigen::VectorXd xf = Eigen::VectorXd::Zero(nf_);

    SdpSolution sol;
    sol.status = SdpStatus::MaxIter;
    const int max_steps = std::min(opts_.max_iter, kMaxNewtonSteps);
    int iter = 0;
    for (iter = 0; iter <= max_steps; ++iter) {
        Blocks Sinv(nb);
        bool ok = true;
        for (std::size_t k = 0; k < nb; ++k) {
            Eigen::LLT<Eigen::MatrixXd> llt(S[k]);
            if (llt.info() != Eigen::Success) {
                ok = false;
                break;
            }
            Sinv[k] = sym(llt.solve(Eigen::MatrixXd::Identity(dims_[k], dims_[k])));
        }
        if (!ok) break;

        const Eigen::VectorXd AX = apply_A(X, xf);
        const Eigen::VectorXd rp = b_ - AX;
        const Blocks Aty = apply_At(y);
        Blocks Rd(nb);
        for (std::size_t k = 0; k < nb; ++k) Rd[k] = C_[k] - Aty[k] - S[k];
        const Eigen::VectorXd rf = cf_ - Af_.transpose() * y;

        const double pobj = dot(C_, X) + cf_.dot(xf);
        const double dobj = b_.dot(y);
        const double pres = rp.norm();
        const double dres = std::sqrt(dot(Rd, Rd) + rf.squaredNorm());
        const double gap = std::abs(pobj - dobj);
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        sol.gap = gap;

        const double ptol = opts_.eps_abs + opts_.eps_rel * std::max(b_.norm(), AX.norm());
        const double dtol = opts_.eps_abs + opts_.eps_rel * std::max({std::sqrt(dot(C_, C_) + cf_.squaredNorm()),
                                                                       std::sqrt(dot(Aty, Aty)), norm(S)});
        const double gtol = opts_.eps_abs + opts_.eps_rel * (std::abs(pobj) + std::abs(dobj));
        if (pres <= ptol && dres <= dtol && gap <= gtol) {
            sol.status = SdpStatus::Optimal;
            break;
        }
        if (!std::isfinite(pobj) || !std::isfinite(dobj)) break;
        if (norm(X) + xf.norm() > 1e10) {
            sol.status = SdpStatus::Unbounded;
            break;
        }
        if (y.norm() > 1e10) {
            sol.status = SdpStatus::Infeasible;
            break;
        }
        if (iter == max_steps) break;

        const double mu = dot(X, S) / N;
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m_ + nf_, m_ + nf_);
        {
            K.topLeftCorner(m_, m_) = schur(X, Sinv);
            K.topRightCorner(m_, nf_) = Af_;
            K.bottomLeftCorner(nf_, m_) = Af_.transpose();
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);

        // Newton direction for X S = target, with an optional second-order term.
        auto direction = [&](double target, const Blocks* corr, Blocks& dX, Blocks& dS, Eigen::VectorXd& dy,
                             Eigen::VectorXd& dxf) {
            Blocks T(nb);
            for (std::size_t k = 0; k < nb; ++k) {
                T[k] = target * Sinv[k] - X[k] - X[k] * Rd[k] * Sinv[k];
                if (corr) T[k] -= (*corr)[k];
            }
            Eigen::VectorXd rhs(m_ + nf_);
            rhs.head(m_) = rp - apply_A(T, Eigen::VectorXd::Zero(nf_));
            rhs.tail(nf_) = rf;
            Eigen::VectorXd sol_kkt = lu.solve(rhs);
            for (int refine = 0; refine < 2; ++refine) sol_kkt += lu.solve(rhs - K * sol_kkt);
            dy = sol_kkt.head(m_);
            dxf = sol_kkt.tail(nf_);
            const Blocks AtDy = apply_At(dy);
            dS.assign(nb, {});
            dX.assign(nb, {});
            for (std::size_t k = 0; k < nb; ++k) {
                dS[k] = Rd[k] - AtDy[k];
                Eigen::MatrixXd D = target * Sinv[k] - X[k] - X[k] * dS[k] * Sinv[k];
                if (corr) D -= (*corr)[k];
                dX[k] = sym(D);
            }
        };
        auto steps = [&](const Blocks& dX, const Blocks& dS) {
            double ap = std::numeric_limits<double>::infinity(), ad = ap;
            for (std::size_t k = 0; k < nb; ++k) {
                ap = std::min(ap, max_step(X[k], dX[k]));
                ad = std::min(ad, max_step(S[k], dS[k]));
            }
            return std::pair{ap, ad};
        };

        Blocks dXa, dSa, dX, dS;
        Eigen::VectorXd dya, dxfa, dy, dxf;
        direction(0.0, nullptr, dXa, dSa, dya, dxfa);
        auto [apa, ada] = steps(dXa, dSa);
        apa = std::min(1.0, apa);
        ada = std::min(1.0, ada);
        double mu_aff = 0.0;
        for (std::size_t k = 0; k < nb; ++k)
            mu_aff += ((X[k] + apa * dXa[k]).array() * (S[k] + ada * dSa[k]).array()).sum();
        mu_aff /= N;
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        Blocks corr(nb);
        for (std::size_t k = 0; k < nb; ++k) corr[k] = dXa[k] * dSa[k] * Sinv[k];
        direction(sigma * mu, &corr, dX, dS, dy, dxf);
        auto [ap, ad] = steps(dX, dS);
        const double gamma = 0.9 + 0.09 * std::min(apa, ada);
        ap = std::min(1.0, gamma * ap);
        ad = std::min(1.0, gamma * ad);
        if (ap < 1e-12 && ad < 1e-12) break;

        for (std::size_t k = 0; k < nb; ++k) {
            X[k] = sym(X[k] + ap * dX[k]);
            S[k] = sym(S[k] + ad * dS[k]);
        }
        xf += ap * dxf;
        y += ad * dy;
    }
    sol.iterations = iter;

    sol.free_values.resize(static_cast<std::size_t>(nf_));
    for (int i = 0; i < nf_; ++i) sol.free_values[static_cast<std::size_t>(i)] = xf[i] * sigma_b_;
    for (std::size_t k = 0; k < nb; ++k) sol.blocks.push_back(X[k] * sigma_b_);
    sol.objective = -(dot(C_, X) + cf_.dot(xf)) * sigma_b_ * sigma_c_;
    return sol;
}

}  // namespace

SdpSolution solve_interior(const SdpProblem& p, const SdpOptions& opts) { return Interior(p, opts).run(); }

}  // namespace sisstab::sdp::detail
