#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "vac/basis.hpp"
#include "vac/errors.hpp"
#include "vac/trajectory.hpp"

namespace vac {

// Symmetrized time-average estimator of C_ij(t) = E[phi_i(X_0) phi_j(X_t)]
// over all (N - lag) sample pairs of a single stationary trajectory.
inline Eigen::MatrixXd estimate_correlation(const Trajectory& traj, const BasisSet& basis,
                                            double t) {
    Eigen::Index lag = traj.lag_index(t);
    if (t >= traj.duration())
        throw std::invalid_argument("estimate_correlation: lag must be below the duration");
    const Eigen::Index n = basis.size();
    const Eigen::Index pairs = traj.count() - lag;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    if (basis.kind() == BasisSet::Kind::Indicator1d) {
        // one-hot columns: accumulate pair counts per (cell, cell)
        const auto& x = traj.states();
        for (Eigen::Index s = 0; s < pairs; ++s) {
            Eigen::Index a = basis.cell_index(x(s, 0));
            Eigen::Index b = basis.cell_index(x(s + lag, 0));
            c(a, b) += 0.5;
            c(b, a) += 0.5;
        }
        c /= static_cast<double>(pairs);
    } else {
        Eigen::MatrixXd series = basis.evaluate_series(traj);
        Eigen::MatrixXd head = series.topRows(pairs);
        Eigen::MatrixXd tail = series.bottomRows(pairs);
        c = head.transpose() * tail;
        c = (c + c.transpose()) / (2.0 * static_cast<double>(pairs));
    }
    return c;
}

struct CorrelationMeta {
    double duration = 0.0;
    double delta = 0.0;
    std::string basis;
};

struct CorrelationPair {
    Eigen::MatrixXd c0;
    Eigen::MatrixXd ctau;
    double tau = 0.0;
    CorrelationMeta meta;
};

inline CorrelationPair make_correlation_pair(const Trajectory& traj, const BasisSet& basis,
                                             double tau) {
    return {estimate_correlation(traj, basis, 0.0), estimate_correlation(traj, basis, tau), tau,
            {traj.duration(), traj.delta(), basis.describe()}};
}

// Solution of the generalized eigenproblem C(tau) v = lambda C(0) v.
// Columns of `coeffs` are C(0)-orthonormal; eigenvalues sorted descending.
struct VacSolution {
    Eigen::VectorXd eigenvalues;       // size retained
    Eigen::MatrixXd coeffs;            // n x retained
    Eigen::Index retained = 0;
    double tau = 0.0;
    std::vector<Eigen::Index> dropped; // basis directions removed by conditioning
};

namespace detail {

inline void check_symmetric(const Eigen::MatrixXd& m, const char* name) {
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument(std::string(name) + " is not symmetric");
}

}  // namespace detail

// Whiten by the eigendecomposition of C(0), discard directions below
// rank_tol * max eigenvalue, solve the symmetric whitened problem, and
// back-transform.
inline VacSolution solve_vac(const CorrelationPair& pair, double rank_tol = 1e-10) {
    detail::check_symmetric(pair.c0, "C(0)");
    detail::check_symmetric(pair.ctau, "C(tau)");
    Eigen::MatrixXd c0 = 0.5 * (pair.c0 + pair.c0.transpose());
    Eigen::MatrixXd ct = 0.5 * (pair.ctau + pair.ctau.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(c0);
    const Eigen::VectorXd& w = es0.eigenvalues();
    double wmax = w.maxCoeff();
    if (!(wmax > std::numeric_limits<double>::min()))
        throw singular_mass_matrix_error("solve_vac: C(0) is numerically zero");

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w[i] > rank_tol * wmax) keep.push_back(i);
    if (keep.empty()) throw degenerate_solution_error("solve_vac: retained rank is zero");

    const Eigen::Index m = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd whitener(c0.rows(), m);
    for (Eigen::Index j = 0; j < m; ++j)
        whitener.col(j) = es0.eigenvectors().col(keep[j]) / std::sqrt(w[keep[j]]);

    Eigen::MatrixXd reduced = whitener.transpose() * ct * whitener;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (reduced + reduced.transpose()));

    VacSolution sol;
    sol.tau = pair.tau;
    sol.retained = m;
    sol.eigenvalues.resize(m);
    sol.coeffs.resize(c0.rows(), m);
    // ascending from Eigen; emit descending (stable under ties by construction)
    for (Eigen::Index j = 0; j < m; ++j) {
        sol.eigenvalues[j] = es.eigenvalues()[m - 1 - j];
        sol.coeffs.col(j) = whitener * es.eigenvectors().col(m - 1 - j);
    }
    // reproducible sign: largest-magnitude coefficient positive
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::Index imax = 0;
        sol.coeffs.col(j).cwiseAbs().maxCoeff(&imax);
        if (sol.coeffs(imax, j) < 0.0) sol.coeffs.col(j) = -sol.coeffs.col(j);
    }
    // record empty directions removed by the conditioning truncation
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w[i] <= rank_tol * wmax) {
            Eigen::Index imax = 0;
            es0.eigenvectors().col(i).cwiseAbs().maxCoeff(&imax);
            sol.dropped.push_back(imax);
        }
    std::sort(sol.dropped.begin(), sol.dropped.end());
    return sol;
}

// Scalar series of eigenfunction i (1-based) along a trajectory.
inline Eigen::VectorXd eigenfunction_series(const VacSolution& sol, const BasisSet& basis,
                                            Eigen::Index i, const Trajectory& traj) {
    if (i < 1 || i > sol.retained)
        throw std::invalid_argument("eigenfunction_series: index out of range");
    const Eigen::VectorXd v = sol.coeffs.col(i - 1);
    Eigen::VectorXd out(traj.count());
    if (basis.kind() == BasisSet::Kind::Indicator1d) {
        for (Eigen::Index s = 0; s < traj.count(); ++s)
            out[s] = v[basis.cell_index(traj.states()(s, 0))];
    } else {
        out = basis.evaluate_series(traj) * v;
    }
    return out;
}

// Implied timescale -tau/log(lambda) per eigenvalue. Markers are in-band:
// +infinity for lambda >= 1, quiet NaN for lambda <= 0.
inline Eigen::VectorXd implied_timescales(const VacSolution& sol) {
    Eigen::VectorXd out(sol.retained);
    for (Eigen::Index i = 0; i < sol.retained; ++i) {
        double lam = sol.eigenvalues[i];
        if (lam >= 1.0)
            out[i] = std::numeric_limits<double>::infinity();
        else if (lam <= 0.0)
            out[i] = std::numeric_limits<double>::quiet_NaN();
        else
            out[i] = -sol.tau / std::log(lam);
    }
    return out;
}

}  // namespace vac
