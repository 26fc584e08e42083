#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace vac {

struct GaussRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

namespace detail {

// Golub-Welsch: nodes/weights from the symmetric Jacobi matrix of the
// orthogonal polynomial recurrence.
inline GaussRule golub_welsch(const Eigen::VectorXd& offdiag, double weight_mass) {
    Eigen::Index n = offdiag.size() + 1;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        jac(k, k + 1) = offdiag[k];
        jac(k + 1, k) = offdiag[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    GaussRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = weight_mass * v0 * v0;
    }
    return rule;
}

}  // namespace detail

// Gauss-Legendre on [-1, 1].
inline GaussRule gauss_legendre(Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
    Eigen::VectorXd off(n - 1);
    for (Eigen::Index k = 1; k < n; ++k) {
        double kk = static_cast<double>(k);
        off[k - 1] = kk / std::sqrt(4.0 * kk * kk - 1.0);
    }
    return detail::golub_welsch(off, 2.0);
}

// Gauss-Hermite with weight e^{-t^2} (physicists' convention).
inline GaussRule gauss_hermite(Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1");
    Eigen::VectorXd off(n - 1);
    for (Eigen::Index k = 1; k < n; ++k) off[k - 1] = std::sqrt(static_cast<double>(k) / 2.0);
    return detail::golub_welsch(off, std::sqrt(M_PI));
}

// Composite rule over panels cut at the given interior edges, each panel
// subdivided so no piece exceeds max_width.
struct CompositeRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

inline CompositeRule composite_gauss_legendre(const std::vector<double>& edges,
                                              Eigen::Index points_per_panel,
                                              double max_width) {
    GaussRule base = gauss_legendre(points_per_panel);
    std::vector<double> xs, ws;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        double a = edges[p], b = edges[p + 1];
        auto nsub = static_cast<Eigen::Index>(std::ceil((b - a) / max_width));
        if (nsub < 1) nsub = 1;
        for (Eigen::Index s = 0; s < nsub; ++s) {
            double aa = a + (b - a) * static_cast<double>(s) / static_cast<double>(nsub);
            double bb = a + (b - a) * static_cast<double>(s + 1) / static_cast<double>(nsub);
            double half = 0.5 * (bb - aa), mid = 0.5 * (aa + bb);
            for (Eigen::Index i = 0; i < points_per_panel; ++i) {
                xs.push_back(half * base.nodes[i] + mid);
                ws.push_back(half * base.weights[i]);
            }
        }
    }
    CompositeRule rule;
    rule.nodes = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    rule.weights = Eigen::Map<Eigen::VectorXd>(ws.data(), static_cast<Eigen::Index>(ws.size()));
    return rule;
}

}  // namespace vac
