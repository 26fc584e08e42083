#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "vac/subspace.hpp"

namespace vac {

// Ground-truth spectral data on a discrete ambient (quadrature nodes or grid
// points): decay rates sigma_1 = 0 < sigma_2 <= ..., mu-orthonormal
// eigenfunction values per node, and the stationary measure defining the
// ambient Gram matrix. tail_sigma = sigma_{r+1} bounds the operator norm of
// the residual beyond the listed modes.
struct SpectralReference {
    Eigen::MatrixXd nodes;           // N x d node coordinates
    Eigen::VectorXd weights;         // stationary measure mu at nodes
    Eigen::VectorXd sigmas;          // r decay rates, ascending
    Eigen::MatrixXd eigenfunctions;  // N x r node values
    double tail_sigma = 0.0;

    Eigen::Index num_modes() const { return sigmas.size(); }
    double tail_rate(double tau) const { return std::exp(-tail_sigma * tau); }
    GramMatrix gram() const { return GramMatrix::diagonal(weights); }

    // Span of eigenfunctions j..k (1-based, inclusive) as a SubspaceRep.
    SubspaceRep eigenspace(Eigen::Index j, Eigen::Index k) const {
        return {eigenfunctions.middleCols(j - 1, k - j + 1), gram()};
    }
};

}  // namespace vac
