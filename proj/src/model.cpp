#include "sisstab/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sisstab/errors.hpp"

namespace sisstab {

std::string to_string(DirectionKind kind) {
    switch (kind) {
        case DirectionKind::Infinite: return "infinite";
        case DirectionKind::Periodic: return "periodic";
        case DirectionKind::Finite: return "finite";
    }
    return "?";
}

RatMatrix RatMatrix::from_strings(const std::vector<std::vector<std::string>>& rows) {
    RatMatrix m;
    m.rows = static_cast<int>(rows.size());
    m.cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != m.cols) throw ShapeError("ragged matrix rows");
        for (const auto& s : row) m.data.push_back(parse_rational(s));
    }
    return m;
}

bool RatMatrix::is_zero() const {
    for (const auto& v : data)
        if (sgn(v) != 0) return false;
    return true;
}

Eigen::MatrixXd RatMatrix::to_eigen() const {
    Eigen::MatrixXd out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out(r, c) = at(r, c).get_d();
    return out;
}

int SisModel::n() const {
    int total = 0;
    for (const auto& d : directions) total += d.width();
    return total;
}

int SisModel::channel_offset(int i) const {
    int off = 0;
    for (int k = 0; k < i; ++k) off += directions[static_cast<std::size_t>(k)].width();
    return off;
}

std::vector<std::string> SisModel::channel_labels() const {
    std::vector<std::string> labels;
    for (int i = 0; i < L(); ++i) {
        const auto& d = directions[static_cast<std::size_t>(i)];
        for (int k = 0; k < d.n_pos; ++k) labels.push_back("v" + std::to_string(i + 1) + "[" + std::to_string(k) + "]");
        for (int k = 0; k < d.n_neg; ++k)
            labels.push_back("v-" + std::to_string(i + 1) + "[" + std::to_string(k) + "]");
    }
    return labels;
}

bool SisModel::all_infinite() const {
    for (const auto& d : directions)
        if (d.kind != DirectionKind::Infinite) return false;
    return true;
}

bool SisModel::all_periodic() const {
    for (const auto& d : directions)
        if (d.kind != DirectionKind::Periodic) return false;
    return true;
}

bool SisModel::has_finite() const {
    for (const auto& d : directions)
        if (d.kind == DirectionKind::Finite) return true;
    return false;
}

namespace {

void expect_shape(const RatMatrix& m, const char* name, int rows, int cols) {
    if (m.rows != rows || m.cols != cols)
        throw ShapeError(std::string(name) + " is " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                         ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
}

}  // namespace

void SisModel::validate() const {
    if (n0 < 1) throw ShapeError("n0 must be positive");
    if (directions.empty()) throw ShapeError("at least one spatial direction is required");
    for (std::size_t i = 0; i < directions.size(); ++i) {
        const auto& d = directions[i];
        if (d.n_pos < 0 || d.n_neg < 0 || d.width() < 1)
            throw ShapeError("direction " + std::to_string(i + 1) + " needs n_pos + n_neg >= 1");
        if (d.kind != DirectionKind::Infinite && d.period < 1)
            throw ShapeError("direction " + std::to_string(i + 1) + " needs period >= 1");
    }
    const int nn = n();
    expect_shape(A_TT, "A_TT", n0, n0);
    expect_shape(A_TS, "A_TS", n0, nn);
    expect_shape(A_ST, "A_ST", nn, n0);
    expect_shape(A_SS, "A_SS", nn, nn);
    for (const auto& b : boundaries) {
        if (b.direction < 0 || b.direction >= L() ||
            directions[static_cast<std::size_t>(b.direction)].kind != DirectionKind::Finite)
            throw ShapeError("boundary matrix attached to a direction that is not finite-extent");
        if (b.M.rows != b.M.cols || b.M.rows < 1) throw ShapeError("boundary matrix must be square");
    }
}

MatTrigPoly build_delta(const SisModel& m) {
    const int nn = m.n();
    const int L = m.L();
    MatTrigPoly delta(nn, nn, L);
    int row = 0;
    for (int i = 0; i < L; ++i) {
        const auto& d = m.directions[static_cast<std::size_t>(i)];
        for (int k = 0; k < d.n_pos; ++k, ++row) delta(row, row) = TrigPoly::variable(L, i, 1);
        for (int k = 0; k < d.n_neg; ++k, ++row) delta(row, row) = TrigPoly::variable(L, i, -1);
    }
    return delta;
}

ResolventPolys build_h_H(const SisModel& m, int size_limit) {
    m.validate();
    const int L = m.L();
    const int nn = m.n();
    MatTrigPoly shifted = build_delta(m) - MatTrigPoly::from_constants(nn, nn, L, m.A_SS.data);
    TrigPoly h = det(shifted, size_limit);
    MatTrigPoly adj = adjugate(shifted, size_limit);
    MatTrigPoly ats = MatTrigPoly::from_constants(m.n0, nn, L, m.A_TS.data);
    MatTrigPoly ast = MatTrigPoly::from_constants(nn, m.n0, L, m.A_ST.data);
    MatTrigPoly att = MatTrigPoly::from_constants(m.n0, m.n0, L, m.A_TT.data);
    MatTrigPoly H = h * att + ats * adj * ast;
    return {std::move(h), std::move(H)};
}

Eigen::MatrixXcd eval_A(const SisModel& m, std::span<const std::complex<double>> z) {
    const int nn = m.n();
    Eigen::MatrixXcd shifted = -m.A_SS.to_eigen().cast<std::complex<double>>();
    int row = 0;
    for (int i = 0; i < m.L(); ++i) {
        const auto& d = m.directions[static_cast<std::size_t>(i)];
        const auto zi = z[static_cast<std::size_t>(i)];
        for (int k = 0; k < d.n_pos; ++k, ++row) shifted(row, row) += zi;
        for (int k = 0; k < d.n_neg; ++k, ++row) shifted(row, row) += 1.0 / zi;
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    if (nn > 0 && !(lu.rcond() > 1e-13)) {
        std::string where;
        for (std::size_t i = 0; i < z.size(); ++i)
            where += (i ? ", " : "") + std::to_string(std::arg(z[i])) + " rad";
        throw WellPosednessError("Delta(z) - A_SS is singular at angles (" + where + ")");
    }
    Eigen::MatrixXcd A = m.A_TT.to_eigen().cast<std::complex<double>>();
    A += m.A_TS.to_eigen().cast<std::complex<double>>() * lu.solve(m.A_ST.to_eigen().cast<std::complex<double>>());
    return A;
}

Eigen::MatrixXcd eval_A_at_one(const SisModel& m) {
    std::vector<std::complex<double>> ones(static_cast<std::size_t>(m.L()), 1.0);
    return eval_A(m, ones);
}

std::vector<std::vector<std::complex<double>>> torus_grid(const std::vector<int>& counts) {
    std::size_t total = 1;
    for (int c : counts) {
        if (c < 1) throw Error("grid counts must be positive");
        total *= static_cast<std::size_t>(c);
    }
    std::vector<std::vector<std::complex<double>>> points;
    points.reserve(total);
    std::vector<int> idx(counts.size(), 0);
    for (std::size_t p = 0; p < total; ++p) {
        std::vector<std::complex<double>> z(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i)
            z[i] = std::polar(1.0, 2.0 * std::numbers::pi * idx[i] / counts[i]);
        points.push_back(std::move(z));
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (++idx[i] < counts[i]) break;
            idx[i] = 0;
        }
    }
    return points;
}

WellPosednessReport wellposedness_scan(const SisModel& m, int grid_density, double tolerance) {
    if (grid_density < 1) throw Error("grid density must be positive");
    const auto [h, H] = build_h_H(m);
    NumericPoly hn(h);
    WellPosednessReport rep;
    rep.tolerance = tolerance;
    rep.min_abs_h = std::numeric_limits<double>::infinity();
    for (const auto& z : torus_grid(std::vector<int>(static_cast<std::size_t>(m.L()), grid_density))) {
        double v = std::abs(hn(z));
        ++rep.points;
        if (v < rep.min_abs_h) {
            rep.min_abs_h = v;
            rep.argmin = z;
        }
    }
    rep.suspect = rep.min_abs_h < tolerance;
    return rep;
}

}  // namespace sisstab
