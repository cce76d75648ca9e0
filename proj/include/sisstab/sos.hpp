#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sisstab/model.hpp"
#include "sisstab/sdp.hpp"
#include "sisstab/trigpoly.hpp"

namespace sisstab {

/// Monomial basis p(z) = p(z_L) x ... x p(z_1), p(z_i) = (1, z_i, ..., z_i^nhat_i).
/// Index of the monomial with exponents a is a_1 + (nhat_1+1)(a_2 + (nhat_2+1)(...)),
/// i.e. z_1 varies fastest.
struct GramBasisSpec {
    DegreeTuple nhat;

    std::size_t size() const;
    DegreeTuple exponents(std::size_t index) const;
};

/// Elementary Toeplitz pattern of the trace parameterization:
/// T(b, a) = 1 iff exponents(b) - exponents(a) = d, so that tr[T(d) G] is the
/// coefficient of z^d in p^T(z^-1) G p(z). Throws Error if |d_i| > nhat_i.
Eigen::MatrixXd toeplitz_T(const DegreeTuple& d, const DegreeTuple& nhat);

/// Coefficients of p^T(z^-1) G p(z), exact after rationalizing G's entries.
TrigPoly gram_polynomial(const Eigen::MatrixXcd& G, const GramBasisSpec& basis);

/// Hermitian description of one periodic direction's roots of unity:
/// D(z) = (z_i^N + z_i^-N)/2 - 1, which is <= 0 on T and vanishes exactly
/// where z_i^N = 1.
struct DomainPoly {
    TrigPoly D;
    int period = 0;
    int direction = 0;  // 0-based variable index
};

DomainPoly domain_poly(int dims, int direction, int period);

/// One DomainPoly per periodic direction, in direction order.
std::vector<DomainPoly> build_domain_polys(const std::vector<DirectionSpec>& directions);

/// A Gram block of a certificate. multiplier 0 is the free SOS term H_{k,0};
/// multiplier i >= 1 multiplies domain polynomial D_i.
struct GramBlock {
    int poly = 0;
    int multiplier = 0;
    GramBasisSpec basis;
    Eigen::MatrixXcd gram;
};

struct Certificate {
    double epsilon = 0.0;
    std::vector<GramBlock> blocks;
    double residual = 0.0;
    double min_eig = 0.0;
    bool valid = false;
    std::string model_hash;
};

/// An assembled SOS program with the bookkeeping needed to read a
/// certificate back out of the solver's blocks.
struct SosProgram {
    sdp::SdpProblem problem;
    std::vector<GramBlock> layout;  // one per solver block, gram left empty
    bool complex_gram = false;      // Hermitian Gram blocks via a real 2N x 2N variable
    std::vector<TrigPoly> polys;
    std::vector<DomainPoly> domain;
};

/// maximize eps s.t. F - eps = p^T(z^-1) G p(z), G PSD with basis degree
/// deg(F) + slack.
SosProgram assemble_global_sdp(const TrigPoly& F, const DegreeTuple& slack);

/// maximize a shared eps s.t. for every k
///   F_k - eps = H_{k,0} + sum_i D_i H_{k,i},  all H SOS,
/// with n_k = ceil(max(deg F_k, deg D_i)/2), deg H_{k,0} = 2(n_k + slack) and
/// deg H_{k,i} = deg H_{k,0} - deg D_i. Throws InfeasibleDegreeLedger when a
/// multiplier degree would be negative.
SosProgram assemble_domain_sdp(const std::vector<TrigPoly>& F_list, const std::vector<DomainPoly>& D,
                               const DegreeTuple& slack);

/// Reads Gram matrices and eps out of a solver result. The residual fields
/// are left for verify_certificate to fill in.
Certificate extract_certificate(const SosProgram& prog, const sdp::SdpSolution& sol);

struct VerifyOptions {
    double rtol = 1e-6;  // relative to max(1, largest |coefficient| of F_k)
    double ptol = 1e-8;
};

struct VerificationReport {
    bool valid = false;
    double residual = 0.0;
    double min_eig = 0.0;
    int worst_poly = -1;
    DegreeTuple worst_degree;
    /// Rigorous lower bound on every F_k over the certified domain:
    /// eps - sum_d |mismatch_d| + N * min(0, lambda_min) of each free SOS block.
    double lower_bound = 0.0;
    std::string message;
};

/// Independent check: every trace tr[T(d) G] is recomputed exactly from a
/// rationalized copy of each Gram block and compared with F_k - eps; each
/// block is tested for PSD. Throws ShapeError on inconsistent shapes.
VerificationReport verify_certificate(const Certificate& cert, const std::vector<TrigPoly>& F_list,
                                      const std::vector<DomainPoly>& D, const VerifyOptions& opts = {});

struct GridMinimum {
    double min_value = 0.0;
    /// |min_value - exact value| stays below this.
    double error_bound = 0.0;
    int poly = -1;
    std::vector<int> index;  // root-of-unity exponent per direction
    std::vector<std::complex<double>> point;
};

/// Minimum of every F_k over the grid of periods[i]-th roots of unity.
/// Exponents are folded exactly mod the periods; values too close to zero
/// for double precision are recomputed with 256-bit floats.
GridMinimum finite_grid_positivity(const std::vector<TrigPoly>& F_list, const std::vector<int>& periods);

std::string certificate_to_json(const Certificate& cert, int indent = 2);
Certificate certificate_from_json(const std::string& text);

}  // namespace sisstab
