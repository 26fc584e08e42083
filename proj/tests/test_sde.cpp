#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "test_oracles.hpp"
#include "vac/sde.hpp"

using vac::Trajectory;

TEST_CASE("ou rejects bad arguments") {
    CHECK_THROWS_AS(vac::simulate_ou(0.0, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(vac::simulate_ou(10.0, -0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(vac::simulate_ou(0.05, 0.1, 1), std::invalid_argument);
}

TEST_CASE("ou boundary count: duration == delta gives two states") {
    Trajectory t = vac::simulate_ou(0.1, 0.1, 42);
    CHECK(t.count() == 2);
    CHECK(t.dim() == 1);
    CHECK(t.duration() == Catch::Approx(0.1));
}

TEST_CASE("ou is reproducible by seed") {
    Trajectory a = vac::simulate_ou(10.0, 0.1, 99);
    Trajectory b = vac::simulate_ou(10.0, 0.1, 99);
    Trajectory c = vac::simulate_ou(10.0, 0.1, 100);
    CHECK(a.states() == b.states());
    CHECK(a.states() != c.states());
}

TEST_CASE("ou stationary variance and lag autocorrelation") {
    const double delta = 0.1, duration = 1e4;
    Trajectory t = vac::simulate_ou(duration, delta, 7);
    const auto n = t.count();
    Eigen::VectorXd x = t.states().col(0);
    double var = x.squaredNorm() / n;
    // Var of the sample second moment of a Gaussian AR(1): (2/N) coth(delta)
    double se_var = std::sqrt(2.0 * (1.0 / std::tanh(delta)) / n);
    CHECK(std::abs(var - 1.0) < 3.0 * se_var);

    double num = x.head(n - 1).dot(x.tail(n - 1)) / (n - 1);
    double rho = num / var;
    double se_rho = std::sqrt(2.0 * (1.0 + std::exp(-2 * delta)) / n);
    CHECK(std::abs(rho - std::exp(-delta)) < 3.0 * se_rho);
}

TEST_CASE("ou one-step conditional law is exact") {
    const double delta = 0.25;
    Trajectory t = vac::simulate_ou(5e3, delta, 11);
    const auto n = t.count();
    Eigen::VectorXd x = t.states().col(0);
    double decay = std::exp(-delta);
    double sd = std::sqrt(1.0 - decay * decay);
    // standardized increments are iid N(0,1) by construction
    Eigen::VectorXd z = (x.tail(n - 1) - decay * x.head(n - 1)) / sd;
    double m = z.mean();
    double v = (z.array() - m).square().sum() / (n - 2);
    CHECK(std::abs(m) < 3.0 / std::sqrt(static_cast<double>(n - 1)));
    CHECK(std::abs(v - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n - 2)));
}

TEST_CASE("double well rejects off-grid sampling interval") {
    vac::DoubleWellSpec spec;
    CHECK_THROWS_AS(vac::simulate_double_well(spec, 20.0, 2.5e-4 * 1.3, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(vac::simulate_double_well(spec, 5.0, 0.05, 1), std::invalid_argument);
}

TEST_CASE("double well determinism") {
    vac::DoubleWellSpec spec;
    spec.burn_in = 0.5;
    Trajectory a = vac::simulate_double_well(spec, 2.0, 0.01, 5);
    Trajectory b = vac::simulate_double_well(spec, 2.0, 0.01, 5);
    CHECK(a.states() == b.states());
    CHECK(a.dim() == 2);
}

TEST_CASE("zero diffusion freezes the dynamics") {
    // with sigma = 0 both the noise and the mobility vanish
    vac::DoubleWellSpec spec;
    spec.sigma.setZero();
    spec.burn_in = 0.0;
    spec.start = {1.0, 0.0};
    Trajectory t = vac::simulate_double_well(spec, 0.1, 0.01, 3);
    for (Eigen::Index s = 0; s < t.count(); ++s) {
        CHECK(t.states()(s, 0) == 1.0);
        CHECK(t.states()(s, 1) == 0.0);
    }
}

TEST_CASE("noise-free drift is a gradient flow into the well") {
    // Euler drift steps with the standard mobility but zero noise
    Eigen::Matrix2d sigma = vac::DoubleWellSpec{}.sigma;
    Eigen::Matrix2d mobility = sigma * sigma.transpose();
    Eigen::Vector2d x(1.0, 0.4);
    double dt = 1e-4;
    double u_prev = vac::double_well_potential(x[0], x[1]);
    for (int s = 0; s < 200000; ++s) {
        x += -0.5 * dt * (mobility * vac::double_well_gradient(x));
        if (s % 1000 == 0) {
            double u = vac::double_well_potential(x[0], x[1]);
            CHECK(u <= u_prev + 1e-12);
            u_prev = u;
        }
    }
    double right_minimum = oracle::bisect(
        [](double v) { return 16 * v * v * v - 16 * v + 1; }, 0.5, 1.5);
    CHECK(x[0] == Catch::Approx(right_minimum).margin(1e-6));
    CHECK(std::abs(x[1]) < 1e-6);
}

TEST_CASE("double well trajectory is bimodal with modes near the potential minima") {
    vac::DoubleWellSpec spec;
    Trajectory t = vac::simulate_double_well(spec, 310.0, 0.05, 17);
    Eigen::VectorXd x1 = t.states().col(0);
    // modes of exp(-U) from 1-D root finding on U'
    double left_mode = oracle::bisect(
        [](double v) { return 16 * v * v * v - 16 * v + 1; }, -1.5, -0.5);
    double right_mode = oracle::bisect(
        [](double v) { return 16 * v * v * v - 16 * v + 1; }, 0.5, 1.5);

    const int bins = 32;
    const double lo = -1.6, hi = 1.6;
    Eigen::VectorXd hist = Eigen::VectorXd::Zero(bins);
    for (Eigen::Index s = 0; s < x1.size(); ++s) {
        int b = static_cast<int>((x1[s] - lo) / (hi - lo) * bins);
        if (b >= 0 && b < bins) hist[b] += 1.0;
    }
    auto mode_in = [&](double from, double to) {
        int best = -1;
        for (int b = 0; b < bins; ++b) {
            double center = lo + (b + 0.5) * (hi - lo) / bins;
            if (center < from || center > to) continue;
            if (best < 0 || hist[b] > hist[best]) best = b;
        }
        return lo + (best + 0.5) * (hi - lo) / bins;
    };
    CHECK(std::abs(mode_in(-1.6, 0.0) - left_mode) < 0.2);
    CHECK(std::abs(mode_in(0.0, 1.6) - right_mode) < 0.2);
    double frac_right = (x1.array() > 0.1).count() / static_cast<double>(x1.size());
    CHECK(frac_right > 0.02);
    CHECK(frac_right < 0.5);
}

TEST_CASE("double well stationarity proxy: gradient components average to zero") {
    vac::DoubleWellSpec spec;
    Trajectory t = vac::simulate_double_well(spec, 210.0, 0.05, 23);
    Eigen::VectorXd g1(t.count()), g2(t.count());
    for (Eigen::Index s = 0; s < t.count(); ++s) {
        Eigen::Vector2d g = vac::double_well_gradient(t.states().row(s).transpose());
        g1[s] = g[0];
        g2[s] = g[1];
    }
    for (const Eigen::VectorXd* g : {&g1, &g2}) {
        double mean = g->mean();
        double sd = std::sqrt((g->array() - mean).square().sum() / (g->size() - 1));
        double tau_int = oracle::integrated_autocorr(*g);
        double se = sd * std::sqrt(2.0 * tau_int / g->size());
        CHECK(std::abs(mean) < 3.0 * se);
    }
}
