#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace vac {

// Uniformly sampled state sequence of a simulated Markov process.
// Immutable after construction and safe to share across threads.
class Trajectory {
public:
    Trajectory(Eigen::MatrixXd states, double delta)
        : states_(std::move(states)), delta_(delta) {
        if (states_.rows() == 0) throw std::invalid_argument("Trajectory: empty state sequence");
        if (!(delta_ > 0.0)) throw std::invalid_argument("Trajectory: delta must be positive");
    }

    const Eigen::MatrixXd& states() const { return states_; }
    double delta() const { return delta_; }
    Eigen::Index count() const { return states_.rows(); }
    Eigen::Index dim() const { return states_.cols(); }
    // Total duration T = (count - 1) * delta.
    double duration() const { return static_cast<double>(count() - 1) * delta_; }

    Eigen::RowVectorXd state(Eigen::Index i) const { return states_.row(i); }

    // Lag index for a time offset that must sit on the sampling grid.
    Eigen::Index lag_index(double t) const {
        if (t < 0.0) throw std::invalid_argument("lag must be nonnegative");
        double ratio = t / delta_;
        auto lag = static_cast<Eigen::Index>(std::llround(ratio));
        if (std::abs(ratio - static_cast<double>(lag)) > 1e-8 * (1.0 + ratio))
            throw std::invalid_argument("lag is not a multiple of the sampling interval");
        return lag;
    }

private:
    Eigen::MatrixXd states_;  // count x dim
    double delta_;
};

}  // namespace vac
