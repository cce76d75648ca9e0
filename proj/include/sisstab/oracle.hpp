#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sisstab/model.hpp"

namespace sisstab {

/// Solves M^H P + P M = -I for Hermitian P and reports whether P is positive
/// definite. Failures of the solve count as "not Hurwitz".
bool hurwitz_lyapunov(const Eigen::MatrixXcd& M);

/// Largest real part of the spectrum, found by bisecting on the shift a with
/// hurwitz_lyapunov(M - aI). Accurate to tol.
double spectral_abscissa(const Eigen::MatrixXcd& M, double tol = 1e-8);

struct SampleResult {
    double max_abscissa = 0.0;
    std::vector<std::complex<double>> argmax;
    std::size_t points = 0;
};

/// Sample counts per direction: periodic directions always use their N-th
/// roots of unity; other directions use grid[i] uniform points (or `fallback`
/// when grid is empty).
std::vector<int> sample_counts(const SisModel& m, const std::vector<int>& grid, int fallback = 32);

/// max over the grid of the spectral abscissa of A(z). Throws
/// WellPosednessError naming the point where Delta(z) - A_SS is singular.
SampleResult freq_sample_abscissa(const SisModel& m, const std::vector<int>& grid, double tol = 1e-8);

/// Finite ring realization of the interconnection. State ordering: site-major,
/// with the site index (k_1, ..., k_L) flattened k_1-fastest; each site holds
/// n0 consecutive states.
struct LiftedSystem {
    std::vector<int> sites;
    int n0 = 0;
    Eigen::SparseMatrix<double> Abig;

    std::size_t num_sites() const;
    /// 0-based site coordinates -> offset of the site's first state.
    std::size_t site_offset(const std::vector<int>& k) const;
    std::vector<int> site_coords(std::size_t site) const;
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(Abig); }
};

LiftedSystem lift_finite_system(const SisModel& m, const std::vector<int>& sites);

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<double> norms;
};

struct SimulationOptions {
    double t_end = 20.0;
    double dt = 1e-3;
    std::vector<double> sample_times{0.0, 3.0, 5.0, 20.0};
    double blowup = 1e12;
};

/// Fixed-step RK4 integration of dx/dt = Abig x, recording the state at each
/// sample time (rounded to the nearest step). Throws Error on blowup.
Trajectory simulate(const LiftedSystem& ls, const Eigen::VectorXd& x0, const SimulationOptions& opts = {});

/// One initial-condition entry: site (0-based), state component, value.
struct InitEntry {
    std::vector<int> site;
    int state = 0;
    double value = 1.0;
};

Eigen::VectorXd initial_state(const LiftedSystem& ls, const std::vector<InitEntry>& entries);

/// Least-squares slope of log ||x(t)|| against t, negated; positive means decay.
/// Samples with zero norm are skipped.
double fit_decay_rate(const Trajectory& tr);

/// Long-format CSV: header "time,k1,...,kL,x1,...,xn0", one row per site and
/// recorded time, site indices 1-based.
std::string trajectory_csv(const LiftedSystem& ls, const Trajectory& tr);

}  // namespace sisstab
