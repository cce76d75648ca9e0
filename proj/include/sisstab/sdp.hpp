#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sisstab::sdp {

/// value * X_b(row, col) of a symmetric block variable X_b. An off-diagonal
/// entry is counted once, i.e. the functional reads X(row,col), not
/// X(row,col) + X(col,row).
struct BlockEntry {
    int block = 0;
    int row = 0;
    int col = 0;
    double value = 0.0;
};

struct LinearFunctional {
    std::vector<BlockEntry> entries;
    std::vector<std::pair<int, double>> free_terms;  // (free variable, coefficient)
};

struct Constraint {
    LinearFunctional lhs;
    double rhs = 0.0;
};

/// maximize objective(X, t) s.t. constraint_i(X, t) = rhs_i, X_b PSD, t free.
struct SdpProblem {
    std::vector<int> block_dims;
    int free_vars = 0;
    std::vector<Constraint> constraints;
    LinearFunctional objective;

    /// Throws Error on out-of-range indices or non-finite data.
    void validate() const;
};

/// Sparse text dump: a header, then "constraint-id block-id row col value"
/// lines. Constraint 0 is the objective, constraints are numbered from 1,
/// block 0 holds the free variables (row = variable index, col = 0) and PSD
/// blocks are numbered from 1. Right-hand sides appear as "rhs <id> <value>".
std::string dump(const SdpProblem& p);

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIter };

std::string to_string(SdpStatus s);

enum class SdpMethod { InteriorPoint, Splitting };

std::string to_string(SdpMethod m);
SdpMethod sdp_method_from_string(const std::string& s);

struct SdpOptions {
    SdpMethod method = SdpMethod::InteriorPoint;
    double eps_abs = 1e-8;
    double eps_rel = 1e-7;
    int max_iter = 200000;
    /// 0 uses the default start; any other value perturbs it deterministically.
    std::uint64_t seed = 0;
    // splitting only
    double rho = 1.0;
    double relaxation = 1.6;
    int check_every = 10;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::MaxIter;
    double objective = 0.0;
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<double> free_values;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
};

/// InteriorPoint: primal-dual path following (HKM direction, Mehrotra
/// predictor-corrector) with free variables kept in the KKT system.
/// Splitting: ADMM alternating an exact projection onto the affine
/// constraint set with eigenvalue clipping onto the PSD cone.
/// Both are deterministic for identical input and options.
SdpSolution solve(const SdpProblem& p, const SdpOptions& opts = {});

/// [[Re H, -Im H], [Im H, Re H]]. Throws Error if H is not Hermitian within tol.
Eigen::MatrixXd hermitian_embed(const Eigen::MatrixXcd& H, double tol = 1e-12);

struct PsdReport {
    bool psd = false;
    double min_eig = 0.0;
};

/// Smallest eigenvalue of the symmetric part of M; psd iff min_eig >= -tol.
PsdReport psd_check(const Eigen::MatrixXd& M, double tol);

}  // namespace sisstab::sdp
