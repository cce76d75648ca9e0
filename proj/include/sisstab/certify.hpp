#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sisstab/matpoly.hpp"
#include "sisstab/model.hpp"
#include "sisstab/sdp.hpp"
#include "sisstab/sos.hpp"

namespace sisstab {

/// Cleared leading column of the Routh-Hurwitz table of phi(lambda, z).
struct RouthTable {
    std::vector<TrigPoly> ebar;               // ebar_{i,0}, i = 0..2n0
    std::vector<TrigPoly> ehat;               // ehat_{i,0} = prod_{k=i-1,i-3,...} ebar_{k,0}
    std::vector<TrigPoly> nonconstant_polys;  // the F_k
    std::vector<int> nonconstant_rows;        // row index of each F_k
    std::vector<int> nonpositive_set;         // rows whose ebar is a non-positive constant
};

enum class VerdictStatus { Stable, NotStable, Indeterminate };

std::string to_string(VerdictStatus s);

struct Verdict {
    VerdictStatus status = VerdictStatus::Indeterminate;
    /// Short tag of the deciding check, e.g. "hurwitz-at-one", "sos-certificate".
    std::string condition;
    std::string reason;
    std::optional<double> epsilon_star;
    std::optional<Certificate> certificate;
    std::vector<std::complex<double>> witness;  // point of T^L, when one exists
    std::optional<int> witness_row;             // Routh row in the non-positive set
    std::vector<TrigPoly> polys;                // polynomials whose positivity was checked
};

/// K = H * circle_conj(h) = |h|^2 A on the torus.
MatTrigPoly build_K(const ResolventPolys& rp);
MatTrigPoly build_K(const SisModel& m);

/// det(-W), W = kron(K, I) + kron(I, circle_conj(K)).
TrigPoly build_F_from_K(const MatTrigPoly& K, int size_limit = kDefaultDetSizeLimit);
TrigPoly build_F_thm1(const SisModel& m, int size_limit = kDefaultDetSizeLimit);

/// Coefficients m_0..m_n of det(lambda I - K) in increasing powers of lambda.
std::vector<TrigPoly> char_poly_K(const MatTrigPoly& K, int size_limit = kDefaultDetSizeLimit);

/// Coefficients of m(lambda) * m_conj(lambda), m_conj having circle_conj'd coefficients.
std::vector<TrigPoly> build_phi(const std::vector<TrigPoly>& m);

/// Throws DegenerateTable when a leading entry vanishes identically before
/// the last row, and NotDivisible if a cleared entry fails to be polynomial.
RouthTable routh_table(const std::vector<TrigPoly>& phi);

/// The polynomials an SOS certificate for this model has to cover, plus the
/// domain polynomials of its periodic directions. Throws Error when the model
/// is decided without any SOS program (degenerate or non-positive Routh rows,
/// or nothing left to certify).
struct SosTargets {
    std::vector<TrigPoly> polys;
    std::vector<DomainPoly> domain;
};

SosTargets sos_targets(const SisModel& m, int size_limit = kDefaultDetSizeLimit);

struct AnalyzeOptions {
    DegreeTuple slack;  // empty means all zeros
    sdp::SdpOptions solver;
    VerifyOptions verify;
    /// Per-circle samples of A(z) checked before building any SOS program;
    /// 0 disables the screen.
    int prescreen_grid = 16;
    /// Per-circle samples used to look for an unstable point when the SOS
    /// bound comes out non-positive.
    int witness_grid = 64;
    int size_limit = kDefaultDetSizeLimit;
};

/// All directions infinite.
Verdict analyze_infinite(const SisModel& m, const AnalyzeOptions& opts = {});

/// At least one periodic direction, no finite-extent ones.
Verdict analyze_periodic(const SisModel& m, const AnalyzeOptions& opts = {});

/// Dispatches on the direction kinds. Throws UnsupportedError for
/// finite-extent directions.
Verdict analyze(const SisModel& m, const AnalyzeOptions& opts = {});

}  // namespace sisstab
