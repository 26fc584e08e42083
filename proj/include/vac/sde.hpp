#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "vac/rng.hpp"
#include "vac/trajectory.hpp"

namespace vac {

// Ornstein-Uhlenbeck process dX = -X dt + sqrt(2) dW, sampled exactly:
// X_{t+d} = e^{-d} X_t + xi, xi ~ N(0, 1 - e^{-2d}), X_0 ~ N(0,1).
inline Trajectory simulate_ou(double duration, double delta, std::uint64_t seed) {
    if (!(delta > 0.0) || !(duration >= delta))
        throw std::invalid_argument("simulate_ou: need duration >= delta > 0");
    auto count = static_cast<Eigen::Index>(std::floor(duration / delta + 1e-9)) + 1;
    NormalSampler normal(seed);
    const double decay = std::exp(-delta);
    const double noise_sd = std::sqrt(1.0 - decay * decay);
    Eigen::MatrixXd states(count, 1);
    states(0, 0) = normal();
    for (Eigen::Index i = 1; i < count; ++i)
        states(i, 0) = decay * states(i - 1, 0) + noise_sd * normal();
    return Trajectory(std::move(states), delta);
}

// Diffusion dX = -1/2 sigma sigma^T grad U dt + sigma dW with the two-well
// potential U(x1,x2) = 4 x1^4 - 8 x1^2 + x1 + 0.5 x2^2.
struct DoubleWellSpec {
    Eigen::Matrix2d sigma = (Eigen::Matrix2d() << 2.0, 0.0, -1.0, std::sqrt(3.0)).finished();
    double dt_internal = 1e-4;
    double burn_in = 10.0;
    Eigen::Vector2d start = Eigen::Vector2d(-1.0, 0.0);
};

inline double double_well_potential(double x1, double x2) {
    return 4.0 * x1 * x1 * x1 * x1 - 8.0 * x1 * x1 + x1 + 0.5 * x2 * x2;
}

inline Eigen::Vector2d double_well_gradient(const Eigen::Vector2d& x) {
    return {16.0 * x[0] * x[0] * x[0] - 16.0 * x[0] + 1.0, x[1]};
}

// Leimkuhler-Matthews BAOAB-limit step: Euler-Maruyama drift plus noise
// increment sigma * (R_n + R_{n+1})/2 * sqrt(dt) with consecutive steps
// sharing one normal 2-vector.
inline Trajectory simulate_double_well(const DoubleWellSpec& spec, double duration, double delta,
                                       std::uint64_t seed) {
    if (!(spec.dt_internal > 0.0)) throw std::invalid_argument("dt_internal must be positive");
    if (spec.burn_in < 0.0) throw std::invalid_argument("burn_in must be nonnegative");
    if (!(duration > spec.burn_in))
        throw std::invalid_argument("duration must exceed the burn-in time");
    double stride_real = delta / spec.dt_internal;
    auto stride = static_cast<long long>(std::llround(stride_real));
    if (stride < 1 || std::abs(stride_real - static_cast<double>(stride)) > 1e-9 * stride_real)
        throw std::invalid_argument("delta must be an integer multiple of dt_internal");

    const Eigen::Matrix2d diffusion = spec.sigma * spec.sigma.transpose();
    const double dt = spec.dt_internal;
    const double sqrt_dt = std::sqrt(dt);
    NormalSampler normal(seed);
    auto draw = [&normal]() { return Eigen::Vector2d(normal(), normal()); };

    auto burn_steps = static_cast<long long>(std::llround(spec.burn_in / dt));
    auto keep = static_cast<Eigen::Index>(std::floor((duration - spec.burn_in) / delta + 1e-9)) + 1;

    Eigen::Vector2d x = spec.start;
    Eigen::Vector2d r_prev = draw();
    Eigen::MatrixXd states(keep, 2);
    long long step = 0;
    Eigen::Index stored = 0;
    auto advance = [&] {
        Eigen::Vector2d r_next = draw();
        x += -0.5 * dt * (diffusion * double_well_gradient(x)) +
             sqrt_dt * (spec.sigma * (0.5 * (r_prev + r_next)));
        r_prev = r_next;
        ++step;
    };
    while (step < burn_steps) advance();
    states.row(stored++) = x.transpose();
    while (stored < keep) {
        for (long long s = 0; s < stride; ++s) advance();
        states.row(stored++) = x.transpose();
    }
    return Trajectory(std::move(states), delta);
}

}  // namespace vac
