#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vac/normal.hpp"
#include "vac/trajectory.hpp"

namespace vac {

// Basis family over states. Indicator bases partition the real line into
// half-open cells [q_{i-1}, q_i); a boundary point belongs to the cell on its
// right. Immutable after construction; evaluation is pure and thread-safe.
class BasisSet {
public:
    enum class Kind { Indicator1d, Polynomial2d, Custom };

    using CustomFn = std::function<double(const Eigen::VectorXd&)>;

    static BasisSet indicator(Eigen::VectorXd boundaries) {
        for (Eigen::Index i = 1; i < boundaries.size(); ++i)
            if (!(boundaries[i] > boundaries[i - 1]))
                throw std::invalid_argument("indicator boundaries must be strictly increasing");
        BasisSet b;
        b.kind_ = Kind::Indicator1d;
        b.dim_ = 1;
        b.n_ = boundaries.size() + 1;
        b.boundaries_ = std::move(boundaries);
        return b;
    }

    static BasisSet polynomial2d(std::vector<std::array<int, 2>> exponents) {
        BasisSet b;
        b.kind_ = Kind::Polynomial2d;
        b.dim_ = 2;
        b.n_ = static_cast<Eigen::Index>(exponents.size());
        b.exponents_ = std::move(exponents);
        return b;
    }

    static BasisSet custom(Eigen::Index dim, std::vector<CustomFn> fns) {
        BasisSet b;
        b.kind_ = Kind::Custom;
        b.dim_ = dim;
        b.n_ = static_cast<Eigen::Index>(fns.size());
        b.custom_ = std::move(fns);
        return b;
    }

    Kind kind() const { return kind_; }
    Eigen::Index size() const { return n_; }
    Eigen::Index dim() const { return dim_; }
    const Eigen::VectorXd& boundaries() const { return boundaries_; }
    const std::vector<std::array<int, 2>>& exponents() const { return exponents_; }

    // Index of the half-open cell containing x (indicator bases only).
    Eigen::Index cell_index(double x) const {
        const double* begin = boundaries_.data();
        const double* end = begin + boundaries_.size();
        return std::upper_bound(begin, end, x) - begin;
    }

    Eigen::VectorXd evaluate(const Eigen::VectorXd& state) const {
        if (state.size() != dim_)
            throw std::invalid_argument("evaluate: state dimension mismatch");
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
        switch (kind_) {
            case Kind::Indicator1d:
                out[cell_index(state[0])] = 1.0;
                break;
            case Kind::Polynomial2d:
                for (Eigen::Index i = 0; i < n_; ++i)
                    out[i] = std::pow(state[0], exponents_[i][0]) *
                             std::pow(state[1], exponents_[i][1]);
                break;
            case Kind::Custom:
                for (Eigen::Index i = 0; i < n_; ++i) out[i] = custom_[i](state);
                break;
        }
        return out;
    }

    // count x n matrix of basis values along a trajectory.
    Eigen::MatrixXd evaluate_series(const Trajectory& traj) const {
        Eigen::MatrixXd out(traj.count(), n_);
        if (kind_ == Kind::Indicator1d) {
            out.setZero();
            for (Eigen::Index s = 0; s < traj.count(); ++s)
                out(s, cell_index(traj.states()(s, 0))) = 1.0;
        } else {
            for (Eigen::Index s = 0; s < traj.count(); ++s)
                out.row(s) = evaluate(traj.states().row(s).transpose()).transpose();
        }
        return out;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::Indicator1d:
                return "indicator-1d(n=" + std::to_string(n_) + ")";
            case Kind::Polynomial2d:
                return "polynomial-2d(n=" + std::to_string(n_) + ")";
            case Kind::Custom:
                return "custom(n=" + std::to_string(n_) + ")";
        }
        return "?";
    }

private:
    BasisSet() = default;

    Kind kind_ = Kind::Custom;
    Eigen::Index n_ = 0;
    Eigen::Index dim_ = 0;
    Eigen::VectorXd boundaries_;
    std::vector<std::array<int, 2>> exponents_;
    std::vector<CustomFn> custom_;
};

// Indicator basis with boundaries at shifted standard normal quantiles,
// q_i = Phi^{-1}(i/n) + offset for i = 1..n-1.
inline BasisSet indicator_basis(Eigen::Index n, double offset) {
    if (n < 2) throw std::invalid_argument("indicator_basis: need n >= 2");
    Eigen::VectorXd q(n - 1);
    for (Eigen::Index i = 1; i < n; ++i)
        q[i - 1] = normal_quantile(static_cast<double>(i) / static_cast<double>(n)) + offset;
    return BasisSet::indicator(std::move(q));
}

// The six monomials {1, x1, x2, x1^2, x1 x2, x2^2} in this order.
inline BasisSet polynomial_basis_2d() {
    return BasisSet::polynomial2d({{{0, 0}}, {{1, 0}}, {{0, 1}}, {{2, 0}}, {{1, 1}}, {{0, 2}}});
}

}  // namespace vac
