#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "vac/basis.hpp"
#include "vac/errors.hpp"
#include "vac/spectral_reference.hpp"

namespace vac {

// Orthogonalized projections of the true eigenfunctions onto the basis span:
// Gram-Schmidt of P_span(eta_1), P_span(eta_2), ... where the k-th projection
// coefficient uses <q_i, eta_k> (equal to <q_i, P_span(eta_k)> since q_i lies
// in the span). These are the long-lag limits of the idealized eigenfunctions.
struct OrthogonalizedProjections {
    Eigen::MatrixXd q_nodes;   // N x p node values, mu-orthonormal
    Eigen::MatrixXd overlaps;  // overlaps(i, j) = <eta_{i+1}, q_{j+1}>, all modes x p
};

inline OrthogonalizedProjections orthogonalized_projections(const SpectralReference& ref,
                                                            const Eigen::MatrixXd& basis_nodes,
                                                            Eigen::Index p,
                                                            double degeneracy_tol = 1e-8) {
    if (p < 1 || p > ref.num_modes())
        throw std::invalid_argument("orthogonalized_projections: p out of range");
    const Eigen::VectorXd& w = ref.weights;

    // L2(mu) projection onto the basis span via normal equations
    Eigen::MatrixXd gphi = w.asDiagonal() * basis_nodes;
    Eigen::MatrixXd gram = basis_nodes.transpose() * gphi;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(0.5 * (gram + gram.transpose()));
    if (ldlt.info() != Eigen::Success)
        throw degenerate_projection_error("orthogonalized_projections: singular basis Gram");
    Eigen::MatrixXd eta = ref.eigenfunctions.leftCols(p);
    Eigen::MatrixXd projected = basis_nodes * ldlt.solve(gphi.transpose() * eta);

    OrthogonalizedProjections out;
    out.q_nodes.resize(basis_nodes.rows(), p);
    for (Eigen::Index k = 0; k < p; ++k) {
        Eigen::VectorXd qt = projected.col(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            double coef = out.q_nodes.col(i).dot(w.cwiseProduct(eta.col(k)));
            qt -= coef * out.q_nodes.col(i);
        }
        double norm = std::sqrt(qt.dot(w.cwiseProduct(qt)));
        if (!(norm > degeneracy_tol))
            throw degenerate_projection_error(
                "orthogonalized_projections: projections nearly dependent at index " +
                std::to_string(k + 1));
        out.q_nodes.col(k) = qt / norm;
    }
    out.overlaps = ref.eigenfunctions.transpose() * (w.asDiagonal() * out.q_nodes);
    return out;
}

}  // namespace vac
