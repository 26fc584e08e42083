#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "vac/basis.hpp"
#include "vac/errors.hpp"
#include "vac/parallel.hpp"
#include "vac/trajectory.hpp"
#include "vac/vac_core.hpp"

namespace vac {

// Sensitivity of the eigenfunction block j..k to correlation-matrix error:
// the inverse of the smaller eigenvalue gap at the block boundary, with the
// conventions lambda_0 = +inf and lambda_{n+1} = -inf.
inline double condition_number(const Eigen::VectorXd& eigenvalues, Eigen::Index j,
                               Eigen::Index k) {
    const Eigen::Index n = eigenvalues.size();
    if (j < 1 || j > k || k > n) throw std::invalid_argument("condition_number: need 1<=j<=k<=n");
    const double inf = std::numeric_limits<double>::infinity();
    double gap_above = (j == 1) ? inf : eigenvalues[j - 2] - eigenvalues[j - 1];
    double gap_below = (k == n) ? inf : eigenvalues[k - 1] - eigenvalues[k];
    double gap = std::min(gap_above, gap_below);
    if (gap <= 0.0) return inf;
    return std::isinf(gap) ? 0.0 : 1.0 / gap;
}

struct MinCondition {
    double tau = 0.0;
    double value = std::numeric_limits<double>::infinity();
};

// Minimum of the data-driven condition number across a lag-time sweep.
inline MinCondition min_condition_number(const std::vector<VacSolution>& sweep, Eigen::Index j,
                                         Eigen::Index k) {
    if (sweep.empty()) throw std::invalid_argument("min_condition_number: empty sweep");
    MinCondition best;
    bool first = true;
    for (const VacSolution& sol : sweep) {
        double c = condition_number(sol.eigenvalues, j, std::min(k, sol.retained));
        if (first || c < best.value) {
            best = {sol.tau, c};
            first = false;
        }
    }
    return best;
}

// First-order residual of a sampled correlation pair against a reference
// solution: entries v_i^T [C_hat(tau) - lambda_j C_hat(0)] v_j. Zero when the
// sampled matrices are exact; linear in the perturbation.
struct ResidualMatrix {
    Eigen::MatrixXd entries;
    double tau = 0.0;
};

inline ResidualMatrix residual_matrix(const CorrelationPair& sampled, const VacSolution& sol) {
    if (sampled.c0.rows() != sol.coeffs.rows())
        throw std::invalid_argument("residual_matrix: dimension mismatch");
    const Eigen::MatrixXd& v = sol.coeffs;
    Eigen::MatrixXd a = v.transpose() * sampled.ctau * v;
    Eigen::MatrixXd b = v.transpose() * sampled.c0 * v;
    return {a - b * sol.eigenvalues.asDiagonal(), sampled.tau};
}

struct FirstOrderErrors {
    Eigen::VectorXd eigenvalue_errors;  // L_ii for i in j..k
    double subspace_error = 0.0;
};

// Leading-order eigenvalue shifts and block subspace error
// sqrt(sum_{l outside} sum_{m inside} |L_lm / (lambda_l - lambda_m)|^2).
inline FirstOrderErrors first_order_errors(const ResidualMatrix& residual,
                                           const Eigen::VectorXd& eigenvalues, Eigen::Index j,
                                           Eigen::Index k) {
    const Eigen::Index n = eigenvalues.size();
    if (j < 1 || j > k || k > n) throw std::invalid_argument("first_order_errors: bad block");
    FirstOrderErrors out;
    out.eigenvalue_errors.resize(k - j + 1);
    for (Eigen::Index i = j; i <= k; ++i)
        out.eigenvalue_errors[i - j] = residual.entries(i - 1, i - 1);
    double acc = 0.0;
    for (Eigen::Index l = 1; l <= n; ++l) {
        if (l >= j && l <= k) continue;
        for (Eigen::Index m = j; m <= k; ++m) {
            double gap = eigenvalues[l - 1] - eigenvalues[m - 1];
            if (gap == 0.0)
                throw division_guard_error("first_order_errors: zero eigenvalue gap");
            double term = residual.entries(l - 1, m - 1) / gap;
            acc += term * term;
        }
    }
    out.subspace_error = std::sqrt(acc);
    return out;
}

struct MseOptions {
    double window_factor = 6.0;   // smallest K with K >= factor * tau_int(K)
    double cap_fraction = 0.1;    // K <= cap_fraction * series length
    double min_pairs = 100.0;     // require T - tau >= min_pairs * delta
};

// Data-driven asymptotic mean squared estimation error for the eigenvalues in
// block j..k and for the block subspace.
struct MseReport {
    double tau = 0.0;
    Eigen::Index j = 1, k = 1;
    Eigen::MatrixXd variances;       // (retained x block): V^2_{l,m}
    Eigen::MatrixXi windows;         // truncation K per pair
    Eigen::VectorXd eigenvalue_mse;  // V^2_{ii}, i in j..k
    double subspace_mse = 0.0;
    double rms_subspace = 0.0;
    int floored_variances = 0;       // raw estimates below zero (flagged, floored)
};

inline MseReport estimate_mse(const Trajectory& traj, const VacSolution& sol,
                              const BasisSet& basis, Eigen::Index j, Eigen::Index k,
                              MseOptions opts = {}) {
    const Eigen::Index n = sol.retained;
    if (j < 1 || j > k || k > n) throw std::invalid_argument("estimate_mse: bad block");
    const Eigen::Index lag = traj.lag_index(sol.tau);
    if (traj.duration() - sol.tau < opts.min_pairs * traj.delta())
        throw insufficient_data_error("estimate_mse: trajectory too short at this lag");
    const Eigen::Index pairs = traj.count() - lag;
    const double duration = traj.duration();

    // eigenfunction value series, one column per retained mode
    Eigen::MatrixXd series(traj.count(), n);
    if (basis.kind() == BasisSet::Kind::Indicator1d) {
        for (Eigen::Index s = 0; s < traj.count(); ++s)
            series.row(s) = sol.coeffs.row(basis.cell_index(traj.states()(s, 0)));
    } else {
        series = basis.evaluate_series(traj) * sol.coeffs;
    }

    const Eigen::Index block = k - j + 1;
    MseReport rep;
    rep.tau = sol.tau;
    rep.j = j;
    rep.k = k;
    rep.variances = Eigen::MatrixXd::Zero(n, block);
    rep.windows = Eigen::MatrixXi::Zero(n, block);
    std::vector<int> floored(static_cast<std::size_t>(n * block), 0);

    const auto cap = static_cast<Eigen::Index>(opts.cap_fraction * static_cast<double>(pairs));
    parallel_for_each(n * block, [&](Eigen::Index pair_idx) {
        const Eigen::Index l = pair_idx / block;       // 0-based row
        const Eigen::Index m = j - 1 + pair_idx % block;
        const double lam = sol.eigenvalues[m];
        Eigen::VectorXd f(pairs);
        {
            const double* gl = series.col(l).data();
            const double* gm = series.col(m).data();
            for (Eigen::Index s = 0; s < pairs; ++s) {
                double cross = 0.5 * (gl[s] * gm[s + lag] + gl[s + lag] * gm[s]);
                double same = 0.5 * (gl[s] * gm[s] + gl[s + lag] * gm[s + lag]);
                f[s] = cross - lam * same;
            }
        }
        double r0 = f.squaredNorm() / static_cast<double>(pairs);
        double tau_int = 0.5;
        double twice_sum = 0.0;
        Eigen::Index window = 0;
        if (r0 > 0.0) {
            for (Eigen::Index s = 1; s <= cap; ++s) {
                double rs = f.head(pairs - s).dot(f.tail(pairs - s)) /
                            static_cast<double>(pairs - s);
                twice_sum += 2.0 * rs;
                tau_int += rs / r0;
                window = s;
                if (static_cast<double>(s) >= opts.window_factor * tau_int) break;
            }
        }
        double v2 = traj.delta() / duration * (r0 + twice_sum);
        if (v2 < 0.0) {
            floored[static_cast<std::size_t>(pair_idx)] = 1;
            v2 = 0.0;
        }
        rep.variances(l, m - j + 1) = v2;
        rep.windows(l, m - j + 1) = static_cast<int>(window);
    });

    for (int flag : floored) rep.floored_variances += flag;
    rep.eigenvalue_mse.resize(block);
    for (Eigen::Index m = j; m <= k; ++m)
        rep.eigenvalue_mse[m - j] = rep.variances(m - 1, m - j);
    double acc = 0.0;
    for (Eigen::Index l = 1; l <= n; ++l) {
        if (l >= j && l <= k) continue;
        for (Eigen::Index m = j; m <= k; ++m) {
            double gap = sol.eigenvalues[l - 1] - sol.eigenvalues[m - 1];
            if (gap == 0.0) throw division_guard_error("estimate_mse: zero eigenvalue gap");
            acc += rep.variances(l - 1, m - j) / (gap * gap);
        }
    }
    rep.subspace_mse = acc;
    rep.rms_subspace = std::sqrt(acc);
    return rep;
}

}  // namespace vac
