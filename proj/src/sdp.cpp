#include "sisstab/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/Sparse>

#include "sdp_detail.hpp"
#include "sisstab/errors.hpp"

namespace sisstab::sdp {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

std::size_t svec_size(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2; }

std::size_t svec_index(int r, int c) {
    if (r > c) std::swap(r, c);
    return static_cast<std::size_t>(c) * static_cast<std::size_t>(c + 1) / 2 + static_cast<std::size_t>(r);
}

Eigen::MatrixXd unpack(const Eigen::Ref<const Eigen::VectorXd>& v, int n) {
    Eigen::MatrixXd X(n, n);
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < c; ++r) {
            const double val = v[static_cast<Eigen::Index>(svec_index(r, c))] / kSqrt2;
            X(r, c) = val;
            X(c, r) = val;
        }
        X(c, c) = v[static_cast<Eigen::Index>(svec_index(c, c))];
    }
    return X;
}

void pack(const Eigen::MatrixXd& X, Eigen::Ref<Eigen::VectorXd> v) {
    const int n = static_cast<int>(X.rows());
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < c; ++r)
            v[static_cast<Eigen::Index>(svec_index(r, c))] = 0.5 * (X(r, c) + X(c, r)) * kSqrt2;
        v[static_cast<Eigen::Index>(svec_index(c, c))] = X(c, c);
    }
}

void project_psd(Eigen::Ref<Eigen::VectorXd> v, int n) {
    if (n == 1) {
        v[0] = std::max(v[0], 0.0);
        return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(unpack(v, n));
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    if (es.eigenvalues().minCoeff() >= 0.0) return;
    const Eigen::MatrixXd& Q = es.eigenvectors();
    pack(Q * lam.asDiagonal() * Q.transpose(), v);
}

struct Layout {
    int free_vars = 0;
    std::vector<int> dims;
    std::vector<std::size_t> offset;
    std::size_t size = 0;

    explicit Layout(const SdpProblem& p) : free_vars(p.free_vars), dims(p.block_dims) {
        size = static_cast<std::size_t>(p.free_vars);
        for (int d : dims) {
            offset.push_back(size);
            size += svec_size(d);
        }
    }

    // (column index, multiplier turning a functional coefficient into an svec coefficient)
    std::pair<Eigen::Index, double> locate(const BlockEntry& e) const {
        const std::size_t idx = offset[static_cast<std::size_t>(e.block)] + svec_index(e.row, e.col);
        return {static_cast<Eigen::Index>(idx), e.row == e.col ? 1.0 : 1.0 / kSqrt2};
    }
};

void append_row(const Layout& lay, const LinearFunctional& f, int row, std::vector<Eigen::Triplet<double>>& trip) {
    std::map<Eigen::Index, double> acc;
    for (const auto& [var, coef] : f.free_terms) acc[var] += coef;
    for (const auto& e : f.entries) {
        auto [col, mult] = lay.locate(e);
        acc[col] += e.value * mult;
    }
    for (const auto& [col, v] : acc)
        if (v != 0.0) trip.emplace_back(row, col, v);
}

}  // namespace

void SdpProblem::validate() const {
    auto check_functional = [&](const LinearFunctional& f) {
        for (const auto& e : f.entries) {
            if (e.block < 0 || e.block >= static_cast<int>(block_dims.size()))
                throw Error("constraint references a missing block");
            const int n = block_dims[static_cast<std::size_t>(e.block)];
            if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) throw Error("block entry out of range");
            if (!std::isfinite(e.value)) throw Error("non-finite constraint coefficient");
        }
        for (const auto& [var, coef] : f.free_terms) {
            if (var < 0 || var >= free_vars) throw Error("free variable index out of range");
            if (!std::isfinite(coef)) throw Error("non-finite constraint coefficient");
        }
    };
    for (int d : block_dims)
        if (d < 1) throw Error("PSD blocks must have positive size");
    for (const auto& c : constraints) {
        check_functional(c.lhs);
        if (!std::isfinite(c.rhs)) throw Error("non-finite right-hand side");
    }
    check_functional(objective);
}

std::string dump(const SdpProblem& p) {
    std::ostringstream os;
    os.precision(17);
    os << "# sdp maximize; free " << p.free_vars << "; blocks";
    for (int d : p.block_dims) os << ' ' << d;
    os << "\n# constraint-id block-id row col value\n";
    auto emit = [&](int id, const LinearFunctional& f) {
        for (const auto& [var, coef] : f.free_terms) os << id << " 0 " << var << " 0 " << coef << '\n';
        for (const auto& e : f.entries)
            os << id << ' ' << e.block + 1 << ' ' << e.row << ' ' << e.col << ' ' << e.value << '\n';
    };
    emit(0, p.objective);
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        emit(static_cast<int>(i) + 1, p.constraints[i].lhs);
        os << "rhs " << i + 1 << ' ' << p.constraints[i].rhs << '\n';
    }
    return os.str();
}

std::string to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::Unbounded: return "unbounded";
        case SdpStatus::MaxIter: return "max_iter";
    }
    return "?";
}

std::string to_string(SdpMethod m) { return m == SdpMethod::InteriorPoint ? "ipm" : "admm"; }

SdpMethod sdp_method_from_string(const std::string& s) {
    if (s == "ipm") return SdpMethod::InteriorPoint;
    if (s == "admm") return SdpMethod::Splitting;
    throw Error("unknown SDP method '" + s + "' (expected ipm or admm)");
}

SdpSolution solve(const SdpProblem& p, const SdpOptions& opts) {
    p.validate();
    return opts.method == SdpMethod::InteriorPoint ? detail::solve_interior(p, opts) : detail::solve_splitting(p, opts);
}

namespace detail {

SdpSolution solve_splitting(const SdpProblem& p, const SdpOptions& opts) {
    const Layout lay(p);
    const auto nx = static_cast<Eigen::Index>(lay.size);
    const auto m = static_cast<Eigen::Index>(p.constraints.size());

    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index i = 0; i < m; ++i)
        append_row(lay, p.constraints[static_cast<std::size_t>(i)].lhs, static_cast<int>(i), trip);
    Eigen::SparseMatrix<double, Eigen::RowMajor> A(m, nx);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) b[i] = p.constraints[static_cast<std::size_t>(i)].rhs;

    std::vector<Eigen::Triplet<double>> obj_trip;
    append_row(lay, p.objective, 0, obj_trip);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nx);
    for (const auto& t : obj_trip) c[t.col()] -= t.value();  // minimize -objective

    // equilibrate rows, then normalize b and c
    for (Eigen::Index i = 0; i < m; ++i) {
        const double nrm = A.row(i).norm();
        if (nrm == 0.0) {
            if (b[i] != 0.0) throw Error("constraint " + std::to_string(i) + " reads 0 = nonzero");
            continue;
        }
        A.row(i) /= nrm;
        b[i] /= nrm;
    }
    const double sigma_b = std::max(1.0, b.lpNorm<Eigen::Infinity>());
    const double sigma_c = std::max(1.0, c.lpNorm<Eigen::Infinity>());
    b /= sigma_b;
    c /= sigma_c;

    Eigen::MatrixXd AAt = Eigen::MatrixXd(A * A.transpose());
    AAt.diagonal().array() += 1e-13;
    Eigen::LDLT<Eigen::MatrixXd> normal(AAt);

    auto project_affine = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        Eigen::VectorXd r = A * v - b;
        return v - A.transpose() * normal.solve(r);
    };
    auto project_cone = [&](Eigen::VectorXd& v) {
        for (std::size_t k = 0; k < lay.dims.size(); ++k)
            project_psd(v.segment(static_cast<Eigen::Index>(lay.offset[k]),
                                  static_cast<Eigen::Index>(svec_size(lay.dims[k]))),
                        lay.dims[k]);
    };

    Eigen::VectorXd z = Eigen::VectorXd::Zero(nx);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(nx);
    if (opts.seed != 0) {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> nd(0.0, 1e-3);
        for (Eigen::Index i = 0; i < nx; ++i) z[i] = nd(rng);
        project_cone(z);
    }
    double rho = opts.rho;
    const double alpha = opts.relaxation;

    SdpSolution sol;
    sol.status = SdpStatus::MaxIter;
    Eigen::VectorXd x(nx), xh(nx), z_prev(nx);
    int iter = 0;
    int checks = 0;
    for (iter = 1; iter <= opts.max_iter; ++iter) {
        x = project_affine(z - u - c / rho);
        xh = alpha * x + (1.0 - alpha) * z;
        z_prev = z;
        z = xh + u;
        project_cone(z);
        u += xh - z;

        if (iter % opts.check_every != 0 && iter != opts.max_iter) continue;
        ++checks;
        const Eigen::VectorXd Az = A * z;
        const double pres = (Az - b).norm();
        const Eigen::VectorXd s = -rho * u;
        const Eigen::VectorXd y = normal.solve(A * (c - s));
        const Eigen::VectorXd Aty = A.transpose() * y;
        const double dres = (Aty + s - c).norm();
        const double pobj = c.dot(z);
        const double dobj = b.dot(y);
        const double gap = std::abs(pobj - dobj);
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        sol.gap = gap;

        const double ptol = opts.eps_abs + opts.eps_rel * std::max(b.norm(), Az.norm());
        const double dtol = opts.eps_abs + opts.eps_rel * std::max({c.norm(), Aty.norm(), s.norm()});
        const double gtol = opts.eps_abs + opts.eps_rel * (std::abs(pobj) + std::abs(dobj));
        if (pres <= ptol && dres <= dtol && gap <= gtol) {
            sol.status = SdpStatus::Optimal;
            break;
        }
        if (!std::isfinite(pres) || z.norm() > 1e10) {
            sol.status = SdpStatus::Unbounded;
            break;
        }
        if (rho * u.norm() > 1e10) {
            sol.status = SdpStatus::Infeasible;
            break;
        }
        // residual balancing
        if (checks % 5 == 0) {
            const double rp = pres / std::max(ptol, 1e-300);
            const double rd = dres / std::max(dtol, 1e-300);
            if (rp > 5.0 * rd && rho < 1e6) {
                rho *= 2.0;
                u /= 2.0;
            } else if (rd > 5.0 * rp && rho > 1e-6) {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }
    sol.iterations = std::min(iter, opts.max_iter);

    const Eigen::VectorXd xs = z * sigma_b;
    sol.free_values.resize(static_cast<std::size_t>(p.free_vars));
    for (int i = 0; i < p.free_vars; ++i) sol.free_values[static_cast<std::size_t>(i)] = xs[i];
    for (std::size_t k = 0; k < lay.dims.size(); ++k)
        sol.blocks.push_back(unpack(xs.segment(static_cast<Eigen::Index>(lay.offset[k]),
                                               static_cast<Eigen::Index>(svec_size(lay.dims[k]))),
                                    lay.dims[k]));
    sol.objective = -c.dot(z) * sigma_b * sigma_c;
    return sol;
}

}  // namespace detail

Eigen::MatrixXd hermitian_embed(const Eigen::MatrixXcd& H, double tol) {
    if (H.rows() != H.cols()) throw Error("Hermitian embedding needs a square matrix");
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > tol * std::max(1.0, H.cwiseAbs().maxCoeff()))
        throw Error("matrix is not Hermitian");
    const Eigen::Index n = H.rows();
    Eigen::MatrixXd E(2 * n, 2 * n);
    E.topLeftCorner(n, n) = H.real();
    E.topRightCorner(n, n) = -H.imag();
    E.bottomLeftCorner(n, n) = H.imag();
    E.bottomRightCorner(n, n) = H.real();
    return E;
}

PsdReport psd_check(const Eigen::MatrixXd& M, double tol) {
    if (M.rows() != M.cols()) throw Error("PSD check needs a square matrix");
    if (M.rows() == 0) return {true, 0.0};
    const Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    return {min_eig >= -tol, min_eig};
}

}  // namespace sisstab::sdp
