#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "vac/basis.hpp"
#include "vac/errors.hpp"
#include "vac/projections.hpp"
#include "vac/spectral_reference.hpp"
#include "vac/subspace.hpp"
#include "vac/vac_core.hpp"

namespace vac {

// One evaluated bound instance. `satisfied` means
// lower - tol <= lhs <= upper + tol. A bound whose precondition fails is
// reported not applicable rather than violated; 0/0 ratios for a basis that
// represents the eigenfunctions exactly are fixed to 1 and flagged.
struct BoundReport {
    double tau = 0.0;
    Eigen::Index j = 1, k = 1;
    double lhs = 0.0;
    double bound_lower = -std::numeric_limits<double>::infinity();
    double bound_upper = std::numeric_limits<double>::infinity();
    bool satisfied = false;
    bool applicable = true;
    bool ratio_convention = false;  // lhs fixed to 1 on a 0/0
    double slack = 0.0;
    double tol = 1e-10;

    void finish() {
        slack = std::min(lhs - bound_lower, bound_upper - lhs);
        satisfied = !applicable || slack >= -tol;
    }
};

// Numerical spectral-gap test between consecutive decay rates, relative to
// the larger rate (rates may start at 0).
inline bool sigma_gap_ok(double lo, double hi, double min_rel_gap) {
    return (hi - lo) >= min_rel_gap * std::max(hi, 1e-12);
}

// Gap between {sigma_j..sigma_k} and all other listed rates (tail rate closes
// the top end).
inline bool sigma_block_gap_ok(const SpectralReference& ref, Eigen::Index j, Eigen::Index k,
                               double min_rel_gap = 0.05) {
    if (j > 1 && !sigma_gap_ok(ref.sigmas[j - 2], ref.sigmas[j - 1], min_rel_gap)) return false;
    double above = (k < ref.num_modes()) ? ref.sigmas[k] : ref.tail_sigma;
    return sigma_gap_ok(ref.sigmas[k - 1], above, min_rel_gap);
}

namespace detail {

template <typename Oracle>
VacSolution ideal_vac(const Oracle& oracle, const BasisSet& basis, double tau,
                      double rank_tol = 1e-12) {
    CorrelationPair pair{oracle.ideal_correlation(basis, 0.0),
                         oracle.ideal_correlation(basis, tau), tau, {}};
    return solve_vac(pair, rank_tol);
}

// Span of idealized VAC eigenfunctions j..k on the oracle nodes.
inline SubspaceRep vac_span(const SpectralReference& ref, const Eigen::MatrixXd& basis_nodes,
                            const VacSolution& sol, Eigen::Index j, Eigen::Index k) {
    return {basis_nodes * sol.coeffs.middleCols(j - 1, k - j + 1), ref.gram()};
}

inline SubspaceRep basis_span(const SpectralReference& ref, const Eigen::MatrixXd& basis_nodes) {
    return {basis_nodes, ref.gram()};
}

// Operator norm of P_{span^perp} T_tau P_span in L2(mu) from node data.
inline double offspan_transfer_norm(const SpectralReference& ref,
                                    const Eigen::MatrixXd& basis_nodes,
                                    const Eigen::MatrixXd& transfer_nodes) {
    SubspaceRep phi{basis_nodes, ref.gram()};
    Eigen::MatrixXd to_ortho = orthonormalize_transform(phi);
    Eigen::MatrixXd q = basis_nodes * to_ortho;        // G-orthonormal basis of the span
    Eigen::MatrixXd tq = transfer_nodes * to_ortho;    // T_tau applied to it
    Eigen::MatrixXd gtq = ref.gram().apply(tq);
    Eigen::MatrixXd full = tq.transpose() * gtq;       // (TQ)^T G (TQ)
    Eigen::MatrixXd inspan = q.transpose() * gtq;      // Q^T G (TQ)
    Eigen::MatrixXd m = full - inspan.transpose() * inspan;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace detail

// Sandwich 1 - d2^2(span eta_1..k, span basis) <= lambda_k / e^{-sigma_k tau} <= 1.
template <typename Oracle>
BoundReport rayleigh_ritz_eigenvalue_bound(const Oracle& oracle, const BasisSet& basis,
                                           double tau, Eigen::Index k) {
    const SpectralReference& ref = oracle.reference();
    if (k < 1 || k > ref.num_modes())
        throw std::invalid_argument("rayleigh_ritz_eigenvalue_bound: k out of range");
    VacSolution sol = detail::ideal_vac(oracle, basis, tau);
    if (k > sol.retained) throw resolution_error("eigenvalue bound: mode not retained");
    Eigen::MatrixXd phi = oracle.basis_nodes(basis);
    BoundReport rep;
    rep.tau = tau;
    rep.j = rep.k = k;
    rep.lhs = sol.eigenvalues[k - 1] / std::exp(-ref.sigmas[k - 1] * tau);
    double d2 = subspace_distances(ref.eigenspace(1, k), detail::basis_span(ref, phi)).gap;
    rep.bound_lower = 1.0 - d2 * d2;
    rep.bound_upper = 1.0;
    rep.tol = 1e-8;
    rep.finish();
    return rep;
}

// Sandwich on d_F^2(span gamma_1..k, span eta_1..k) / d_F^2(span eta_1..k, basis)
// with upper factor 1 + |P_{perp} T_tau P_span|_2^2 / |e^{-sigma_k tau} - lambda_{k+1}|^2.
template <typename Oracle>
BoundReport rayleigh_ritz_subspace_bound(const Oracle& oracle, const BasisSet& basis, double tau,
                                         Eigen::Index k) {
    const SpectralReference& ref = oracle.reference();
    VacSolution sol = detail::ideal_vac(oracle, basis, tau);
    if (k + 1 > sol.retained)
        throw resolution_error("subspace bound: needs retained mode k+1");
    Eigen::MatrixXd phi = oracle.basis_nodes(basis);
    BoundReport rep;
    rep.tau = tau;
    rep.j = 1;
    rep.k = k;
    rep.tol = 1e-8;
    double gap = std::exp(-ref.sigmas[k - 1] * tau) - sol.eigenvalues[k];
    if (!(gap > 0.0)) {
        rep.applicable = false;  // bound vacuous; diverges near the crossing
        rep.finish();
        return rep;
    }
    double dhp = subspace_distances(ref.eigenspace(1, k), detail::basis_span(ref, phi)).projection;
    double dgh = subspace_distances(detail::vac_span(ref, phi, sol, 1, k),
                                    ref.eigenspace(1, k)).projection;
    if (dhp < 1e-6) {  // basis carries the block exactly; 0/0 fixed to 1
        rep.lhs = 1.0;
        rep.ratio_convention = true;
    } else {
        rep.lhs = (dgh * dgh) / (dhp * dhp);
    }
    double opnorm =
        detail::offspan_transfer_norm(ref, phi, oracle.transfer_on_basis(basis, tau));
    rep.bound_lower = 1.0;
    rep.bound_upper = 1.0 + (opnorm * opnorm) / (gap * gap);
    rep.finish();
    return rep;
}

// Long-lag-sharp form: upper factor 1 + (1/4)|e^{-sigma_{k+1} tau} /
// (lambda_k - e^{-sigma_{k+1} tau})|^2, applicable when lambda_k beats the
// (k+1)-th true eigenvalue.
template <typename Oracle>
BoundReport improved_subspace_bound(const Oracle& oracle, const BasisSet& basis, double tau,
                                    Eigen::Index k) {
    const SpectralReference& ref = oracle.reference();
    if (k + 1 > ref.num_modes())
        throw std::invalid_argument("improved_subspace_bound: needs sigma_{k+1}");
    VacSolution sol = detail::ideal_vac(oracle, basis, tau);
    if (k > sol.retained) throw resolution_error("improved bound: mode not retained");
    Eigen::MatrixXd phi = oracle.basis_nodes(basis);
    BoundReport rep;
    rep.tau = tau;
    rep.j = 1;
    rep.k = k;
    rep.tol = 1e-8;
    double next = std::exp(-ref.sigmas[k] * tau);
    double lam = sol.eigenvalues[k - 1];
    if (!(lam > next)) {
        rep.applicable = false;
        rep.finish();
        return rep;
    }
    double dhp = subspace_distances(ref.eigenspace(1, k), detail::basis_span(ref, phi)).projection;
    double dgh = subspace_distances(detail::vac_span(ref, phi, sol, 1, k),
                                    ref.eigenspace(1, k)).projection;
    if (dhp < 1e-6) {  // basis carries the block exactly; 0/0 fixed to 1
        rep.lhs = 1.0;
        rep.ratio_convention = true;
    } else {
        rep.lhs = (dgh * dgh) / (dhp * dhp);
    }
    double factor = next / (lam - next);
    rep.bound_lower = 1.0;
    rep.bound_upper = 1.0 + 0.25 * factor * factor;
    rep.finish();
    return rep;
}

// The three long-lag convergence diagnostics over a tau grid:
//   (a) lambda_k e^{sigma_k tau}            -> <eta_k, q_k>^2
//   (b) d_F(span gamma_1..k, span q_1..k)   -> 0
//   (c) (b) * lambda_k / lambda_{k+1}       -> |<eta_{k+1}, q_k> / <eta_{k+1}, q_{k+1}>|
struct LongLagDiagnostics {
    std::vector<double> taus;
    std::vector<double> eigenvalue_ratio;   // (a)
    std::vector<double> subspace_distance;  // (b)
    std::vector<double> product;            // (c)
    double eigenvalue_target = 0.0;
    double product_target = 0.0;
    bool converged_eigenvalue = false;
    bool converged_subspace = false;
    bool converged_product = false;
    bool applicable = true;
};

template <typename Oracle>
LongLagDiagnostics long_lag_limits(const Oracle& oracle, const BasisSet& basis, Eigen::Index k,
                                   const std::vector<double>& tau_grid,
                                   double min_rel_gap = 0.05,
                                   double convergence_tol = 1e-3) {
    const SpectralReference& ref = oracle.reference();
    if (tau_grid.size() < 2) throw std::invalid_argument("long_lag_limits: need >= 2 taus");
    if (!sigma_block_gap_ok(ref, k, k, min_rel_gap) ||
        !sigma_block_gap_ok(ref, k + 1, k + 1, min_rel_gap))
        throw resolution_error("long_lag_limits: spectral gap condition fails");
    Eigen::MatrixXd phi = oracle.basis_nodes(basis);
    OrthogonalizedProjections proj = orthogonalized_projections(ref, phi, k + 1);

    LongLagDiagnostics diag;
    diag.taus = tau_grid;
    diag.eigenvalue_target = proj.overlaps(k - 1, k - 1) * proj.overlaps(k - 1, k - 1);
    double denom = proj.overlaps(k, k);
    if (std::abs(denom) < 1e-10) {
        diag.applicable = false;
        return diag;
    }
    diag.product_target = std::abs(proj.overlaps(k, k - 1) / denom);
    SubspaceRep qspan{proj.q_nodes.leftCols(k), ref.gram()};
    for (double tau : tau_grid) {
        VacSolution sol = detail::ideal_vac(oracle, basis, tau);
        diag.eigenvalue_ratio.push_back(sol.eigenvalues[k - 1] *
                                        std::exp(ref.sigmas[k - 1] * tau));
        double df = subspace_distances(detail::vac_span(ref, phi, sol, 1, k), qspan).projection;
        diag.subspace_distance.push_back(df);
        diag.product.push_back(df * sol.eigenvalues[k - 1] / sol.eigenvalues[k]);
    }
    auto settled = [&](const std::vector<double>& seq) {
        double a = seq[seq.size() - 2], b = seq.back();
        return std::abs(b - a) <= convergence_tol * std::max(1.0, std::abs(b));
    };
    diag.converged_eigenvalue = settled(diag.eigenvalue_ratio);
    diag.converged_subspace = settled(diag.subspace_distance);
    diag.converged_product = settled(diag.product);
    return diag;
}

// Split of the approximation error into its lag-time-independent part
// d_F(span q, span eta) and lag-time-dependent part d_F(span gamma, span q),
// with the triangle inequality and both right-hand-side bounds checked.
struct ErrorDecomposition {
    double lag_independent = 0.0;
    double lag_dependent = 0.0;
    double total = 0.0;
    double rhs_bound = 0.0;
    bool triangle_ok = false;
    bool rhs_ok = false;
    bool prefix_ratio_ok = false;  // d_F^2(q,eta)/d_F^2(eta,span) <= 1/(1 - d2^2 prefix)
};

template <typename Oracle>
ErrorDecomposition error_decomposition(const Oracle& oracle, const BasisSet& basis, double tau,
                                       Eigen::Index j, Eigen::Index k,
                                       double min_rel_gap = 0.05, double tol = 1e-7) {
    const SpectralReference& ref = oracle.reference();
    if (j < 1 || j > k) throw std::invalid_argument("error_decomposition: need 1 <= j <= k");
    if (!sigma_block_gap_ok(ref, j, k, min_rel_gap))
        throw resolution_error("error_decomposition: spectral gap condition fails");
    Eigen::MatrixXd phi = oracle.basis_nodes(basis);
    OrthogonalizedProjections proj = orthogonalized_projections(ref, phi, k);
    VacSolution sol = detail::ideal_vac(oracle, basis, tau);
    if (k > sol.retained) throw resolution_error("error_decomposition: mode not retained");

    SubspaceRep eta_block = ref.eigenspace(j, k);
    SubspaceRep q_block{proj.q_nodes.middleCols(j - 1, k - j + 1), ref.gram()};
    SubspaceRep gamma_block = detail::vac_span(ref, phi, sol, j, k);
    SubspaceRep phi_span = detail::basis_span(ref, phi);

    ErrorDecomposition out;
    out.lag_independent = subspace_distances(q_block, eta_block).projection;
    out.lag_dependent = subspace_distances(gamma_block, q_block).projection;
    out.total = subspace_distances(gamma_block, eta_block).projection;
    double d_prefix = (j > 1)
                          ? subspace_distances(ref.eigenspace(1, j - 1), phi_span).projection
                          : 0.0;
    double d_full = subspace_distances(ref.eigenspace(1, k), phi_span).projection;
    out.rhs_bound = std::sqrt(d_prefix * d_prefix + d_full * d_full);
    out.triangle_ok = out.total <= out.lag_independent + out.lag_dependent + tol;
    out.rhs_ok = out.lag_independent <= out.rhs_bound + tol;

    double d_eta_phi = subspace_distances(eta_block, phi_span).projection;
    if (d_eta_phi < 1e-6) {
        out.prefix_ratio_ok = out.lag_independent <= tol;  // equality convention at 0
    } else {
        double d2_prefix =
            (j > 1) ? subspace_distances(ref.eigenspace(1, j - 1), phi_span).gap : 0.0;
        double ratio = (out.lag_independent * out.lag_independent) / (d_eta_phi * d_eta_phi);
        out.prefix_ratio_ok = ratio <= 1.0 / (1.0 - d2_prefix * d2_prefix) + tol;
    }
    return out;
}

}  // namespace vac
