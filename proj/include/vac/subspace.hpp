#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "vac/errors.hpp"

namespace vac {

// Symmetric positive semidefinite Gram matrix defining <u,w> = u^T G w on the
// ambient basis. Quadrature-node ambients use the diagonal form.
class GramMatrix {
public:
    GramMatrix() = default;
    static GramMatrix diagonal(Eigen::VectorXd weights) {
        GramMatrix g;
        g.diag_ = std::move(weights);
        return g;
    }
    static GramMatrix dense(Eigen::MatrixXd m) {
        GramMatrix g;
        g.dense_ = std::move(m);
        return g;
    }
    static GramMatrix identity(Eigen::Index n) {
        return diagonal(Eigen::VectorXd::Ones(n));
    }

    bool is_diagonal() const { return diag_.size() > 0; }
    Eigen::Index rows() const { return is_diagonal() ? diag_.size() : dense_.rows(); }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const {
        return is_diagonal() ? Eigen::MatrixXd(diag_.asDiagonal() * m) : dense_ * m;
    }

    // A^T G B
    Eigen::MatrixXd inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
        return a.transpose() * apply(b);
    }

private:
    Eigen::VectorXd diag_;
    Eigen::MatrixXd dense_;
};

// Subspace spanned by the columns of `coeffs` under the ambient inner product
// `gram`. Columns must be linearly independent above tolerance.
struct SubspaceRep {
    Eigen::MatrixXd coeffs;  // ambient-dim x k
    GramMatrix gram;
};

// Change of coordinates T such that (C T)^T G (C T) = I.
inline Eigen::MatrixXd orthonormalize_transform(const SubspaceRep& rep, double rank_tol = 1e-12) {
    Eigen::MatrixXd overlap = rep.gram.inner(rep.coeffs, rep.coeffs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (overlap + overlap.transpose()));
    const Eigen::VectorXd& w = es.eigenvalues();
    double wmax = w.maxCoeff();
    if (!(wmax > 0.0) || w.minCoeff() <= rank_tol * wmax)
        throw degenerate_subspace_error("orthonormalize: spanning vectors are rank deficient");
    return es.eigenvectors() * w.cwiseSqrt().cwiseInverse().asDiagonal();
}

// G-orthonormalize the spanning set: returned coeffs satisfy C^T G C = I.
inline SubspaceRep orthonormalize(const SubspaceRep& rep, double rank_tol = 1e-12) {
    return {rep.coeffs * orthonormalize_transform(rep, rank_tol), rep.gram};
}

struct SubspaceDistances {
    double gap;         // operator-norm distance, in [0, 1]
    double projection;  // Frobenius-norm distance, in [0, sqrt(k)]
};

// Distances between span(U) and the nearest dim(U)-dimensional subspace of
// span(W): with G-orthonormal bases and s_1 >= ... >= s_k the singular values
// of the overlap (zero-padded when dim(U) > dim(W)),
//   gap = sqrt(1 - s_k^2),  projection = sqrt(k - sum s_i^2).
inline SubspaceDistances subspace_distances(const SubspaceRep& u, const SubspaceRep& w,
                                            double rank_tol = 1e-12) {
    if (u.coeffs.rows() != w.coeffs.rows())
        throw std::invalid_argument("subspace_distances: ambient dimensions differ");
    SubspaceRep uo = orthonormalize(u, rank_tol);
    SubspaceRep wo = orthonormalize(w, rank_tol);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(uo.gram.inner(uo.coeffs, wo.coeffs));
    const auto k = static_cast<Eigen::Index>(u.coeffs.cols());
    Eigen::VectorXd s = Eigen::VectorXd::Zero(k);
    s.head(svd.singularValues().size()) = svd.singularValues();
    // clip 1e-15-scale excursions before the distance formulas
    for (Eigen::Index i = 0; i < k; ++i) s[i] = std::clamp(s[i], 0.0, 1.0);
    double smin = s[k - 1];
    double sq = s.squaredNorm();
    return {std::sqrt(std::max(0.0, 1.0 - smin * smin)),
            std::sqrt(std::max(0.0, static_cast<double>(k) - sq))};
}

}  // namespace vac
