#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sisstab/matpoly.hpp"
#include "sisstab/rational.hpp"

namespace sisstab {

enum class DirectionKind { Infinite, Periodic, Finite };

std::string to_string(DirectionKind kind);

/// One spatial direction: how sites are connected along it and how wide the
/// forward (v_i) and backward (v_-i) channels are.
struct DirectionSpec {
    DirectionKind kind = DirectionKind::Infinite;
    int n_pos = 0;
    int n_neg = 0;
    int period = 0;  // N_i for Periodic and Finite

    static DirectionSpec infinite(int n_pos, int n_neg) { return {DirectionKind::Infinite, n_pos, n_neg, 0}; }
    static DirectionSpec periodic(int period, int n_pos, int n_neg) {
        return {DirectionKind::Periodic, n_pos, n_neg, period};
    }

    int width() const { return n_pos + n_neg; }
};

/// Exact rational matrix, row-major.
struct RatMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Rational> data;

    RatMatrix() = default;
    RatMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c)) {}
    static RatMatrix from_strings(const std::vector<std::vector<std::string>>& rows);

    Rational& at(int r, int c) { return data[static_cast<std::size_t>(r * cols + c)]; }
    const Rational& at(int r, int c) const { return data[static_cast<std::size_t>(r * cols + c)]; }
    bool is_zero() const;
    Eigen::MatrixXd to_eigen() const;
};

/// Boundary-condition matrix of a finite-extent direction. Carried by the
/// data model only; the analyses reject finite-extent directions.
struct BoundarySpec {
    int direction = 0;
    RatMatrix M;
};

/// The plant: dx/dt = A_TT x + A_TS v, w = A_ST x + A_SS v, with the channel
/// vectors ordered (v_1; v_-1; ...; v_L; v_-L).
struct SisModel {
    int n0 = 0;
    std::vector<DirectionSpec> directions;
    RatMatrix A_TT;
    RatMatrix A_TS;
    RatMatrix A_ST;
    RatMatrix A_SS;
    std::vector<BoundarySpec> boundaries;

    int L() const { return static_cast<int>(directions.size()); }
    /// Total interconnection width n.
    int n() const;
    /// First channel row of direction i (0-based).
    int channel_offset(int i) const;
    /// Labels in channel order, e.g. "v1[0]", "v-1[0]", "v2[0]".
    std::vector<std::string> channel_labels() const;

    bool all_infinite() const;
    bool all_periodic() const;
    bool has_finite() const;

    /// Throws ShapeError (naming the block) or Error on inconsistent data.
    void validate() const;
};

/// Block diagonal diag(z_i I_{n_i}, z_i^-1 I_{n_-i}) in channel order.
MatTrigPoly build_delta(const SisModel& m);

struct ResolventPolys {
    TrigPoly h;     // det(Delta(z) - A_SS)
    MatTrigPoly H;  // A_TT h + A_TS adj(Delta(z) - A_SS) A_ST
};

ResolventPolys build_h_H(const SisModel& m, int size_limit = kDefaultDetSizeLimit);

/// Numeric A(z) = A_TT + A_TS (Delta(z) - A_SS)^-1 A_ST. Throws
/// WellPosednessError when Delta(z) - A_SS is numerically singular.
Eigen::MatrixXcd eval_A(const SisModel& m, std::span<const std::complex<double>> z);

Eigen::MatrixXcd eval_A_at_one(const SisModel& m);

struct WellPosednessReport {
    double min_abs_h = 0.0;
    std::vector<std::complex<double>> argmin;
    std::size_t points = 0;
    double tolerance = 1e-8;
    bool suspect = false;  // min |h| below tolerance somewhere on the grid
    std::string note = "sampled check: necessary, not sufficient";
};

/// Evaluates |h| on grid_density points per circle over T^L.
WellPosednessReport wellposedness_scan(const SisModel& m, int grid_density, double tolerance = 1e-8);

/// All points of the product grid: periodic directions at their N-th roots of
/// unity, the others at `counts[i]` uniformly spaced points.
std::vector<std::vector<std::complex<double>>> torus_grid(const std::vector<int>& counts);

}  // namespace sisstab
