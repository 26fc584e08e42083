#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vac/basis.hpp"
#include "vac/normal.hpp"
#include "vac/quadrature.hpp"
#include "vac/spectral_reference.hpp"

namespace vac {

struct OuQuadratureSpec {
    Eigen::Index points_per_panel = 64;
    double max_panel_width = 0.5;
    // Truncation of the stationary Gaussian; widened automatically so the
    // highest requested mode keeps quadrature error well below 1e-10.
    double tail(Eigen::Index num_modes) const {
        return std::max(8.0, std::sqrt(2.0 * static_cast<double>(num_modes)) + 7.0);
    }
};

// Analytic reference for dX = -X dt + sqrt(2) dW: eigenfunctions are the
// normalized probabilists' Hermite polynomials 1, x, (x^2-1)/sqrt(2), ... with
// decay rates sigma_i = i - 1. All mu-inner products are evaluated by
// composite Gauss-Legendre quadrature with panels cut at the indicator cell
// boundaries.
class OuOracle {
public:
    explicit OuOracle(Eigen::Index num_modes, const BasisSet* panel_basis = nullptr,
                      OuQuadratureSpec spec = {}) {
        if (num_modes < 2) throw std::invalid_argument("OuOracle: num_modes >= 2");
        double tail = spec.tail(num_modes);
        std::vector<double> edges;
        edges.push_back(-tail);
        if (panel_basis && panel_basis->kind() == BasisSet::Kind::Indicator1d)
            for (Eigen::Index i = 0; i < panel_basis->boundaries().size(); ++i)
                edges.push_back(panel_basis->boundaries()[i]);
        edges.push_back(tail);
        CompositeRule rule =
            composite_gauss_legendre(edges, spec.points_per_panel, spec.max_panel_width);

        ref_.nodes = rule.nodes;
        ref_.weights.resize(rule.nodes.size());
        for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
            ref_.weights[i] = rule.weights[i] * normal_pdf(rule.nodes[i]);
        ref_.sigmas = Eigen::VectorXd::LinSpaced(num_modes, 0.0, static_cast<double>(num_modes - 1));
        ref_.eigenfunctions = hermite_values(rule.nodes, num_modes);
        ref_.tail_sigma = static_cast<double>(num_modes);
    }

    const SpectralReference& reference() const { return ref_; }
    Eigen::VectorXd nodes() const { return ref_.nodes.col(0); }
    const Eigen::VectorXd& weights() const { return ref_.weights; }

    // Normalized Hermite values He_k(x)/sqrt(k!) for k < num_modes.
    static Eigen::MatrixXd hermite_values(const Eigen::VectorXd& x, Eigen::Index num_modes) {
        Eigen::MatrixXd h(x.size(), num_modes);
        h.col(0).setOnes();
        if (num_modes > 1) h.col(1) = x;
        for (Eigen::Index k = 2; k < num_modes; ++k)
            h.col(k) = x.cwiseProduct(h.col(k - 1)) - static_cast<double>(k - 1) * h.col(k - 2);
        double fact = 1.0;
        for (Eigen::Index k = 2; k < num_modes; ++k) {
            fact *= static_cast<double>(k);
            h.col(k) /= std::sqrt(fact);
        }
        return h;
    }

    // Node values of the basis functions.
    Eigen::MatrixXd basis_nodes(const BasisSet& basis) const {
        const Eigen::VectorXd& x = nodes();
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.size(), basis.size());
        if (basis.kind() == BasisSet::Kind::Indicator1d) {
            for (Eigen::Index i = 0; i < x.size(); ++i) out(i, basis.cell_index(x[i])) = 1.0;
        } else {
            Eigen::VectorXd state(1);
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                state[0] = x[i];
                out.row(i) = basis.evaluate(state).transpose();
            }
        }
        return out;
    }

    // Node values of T_tau phi_j. Indicator cells use the conditional-law CDF
    // kernel Phi((q - x e^{-tau})/sqrt(1 - e^{-2tau})); other bases use the
    // conditional expectation E[phi(x e^{-tau} + s Z)] by Gauss-Hermite.
    Eigen::MatrixXd transfer_on_basis(const BasisSet& basis, double tau) const {
        if (tau < 0.0) throw std::invalid_argument("transfer_on_basis: tau >= 0");
        const Eigen::VectorXd& x = nodes();
        if (tau == 0.0) return basis_nodes(basis);
        const double decay = std::exp(-tau);
        const double s = std::sqrt(1.0 - decay * decay);
        Eigen::MatrixXd out(x.size(), basis.size());
        if (basis.kind() == BasisSet::Kind::Indicator1d) {
            const Eigen::VectorXd& q = basis.boundaries();
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                double m = x[i] * decay;
                double prev = 0.0;
                for (Eigen::Index j = 0; j < q.size(); ++j) {
                    double cdf = normal_cdf((q[j] - m) / s);
                    out(i, j) = cdf - prev;
                    prev = cdf;
                }
                out(i, q.size()) = 1.0 - prev;
            }
        } else {
            GaussRule gh = gauss_hermite(64);
            const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
            Eigen::VectorXd state(1);
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(basis.size());
                for (Eigen::Index g = 0; g < gh.nodes.size(); ++g) {
                    state[0] = x[i] * decay + s * std::sqrt(2.0) * gh.nodes[g];
                    acc += gh.weights[g] * basis.evaluate(state);
                }
                out.row(i) = (inv_sqrt_pi * acc).transpose();
            }
        }
        return out;
    }

    // Exact-up-to-quadrature C(tau) for the basis; symmetric by construction.
    Eigen::MatrixXd ideal_correlation(const BasisSet& basis, double tau) const {
        if (tau < 0.0) throw std::invalid_argument("ideal_correlation: tau >= 0");
        Eigen::MatrixXd phi = basis_nodes(basis);
        if (tau == 0.0 && basis.kind() == BasisSet::Kind::Indicator1d) {
            // diagonal of exact cell masses Phi(q_i) - Phi(q_{i-1})
            const Eigen::VectorXd& q = basis.boundaries();
            Eigen::VectorXd mass(basis.size());
            double prev = 0.0;
            for (Eigen::Index j = 0; j < q.size(); ++j) {
                double cdf = normal_cdf(q[j]);
                mass[j] = cdf - prev;
                prev = cdf;
            }
            mass[q.size()] = 1.0 - prev;
            return mass.asDiagonal();
        }
        Eigen::MatrixXd tphi = transfer_on_basis(basis, tau);
        Eigen::MatrixXd c = phi.transpose() * ref_.weights.asDiagonal() * tphi;
        return 0.5 * (c + c.transpose());
    }

private:
    SpectralReference ref_;
};

// Spec-facing constructors.
inline OuOracle ou_reference(Eigen::Index num_modes, OuQuadratureSpec spec = {}) {
    return OuOracle(num_modes, nullptr, spec);
}

inline Eigen::MatrixXd ou_ideal_correlation(const OuOracle& oracle, const BasisSet& basis,
                                            double tau) {
    return oracle.ideal_correlation(basis, tau);
}

}  // namespace vac
