#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "test_oracles.hpp"
#include "vac/normal.hpp"
#include "vac/ou_oracle.hpp"
#include "vac/sde.hpp"
#include "vac/subspace.hpp"
#include "vac/vac_core.hpp"

using vac::BasisSet;
using vac::CorrelationPair;
using vac::Trajectory;

namespace {

BasisSet constant_basis() {
    return BasisSet::custom(1, {[](const Eigen::VectorXd&) { return 1.0; }});
}

BasisSet hermite_basis_3() {
    return BasisSet::custom(
        1, {[](const Eigen::VectorXd&) { return 1.0; },
            [](const Eigen::VectorXd& x) { return x[0]; },
            [](const Eigen::VectorXd& x) { return (x[0] * x[0] - 1.0) / std::sqrt(2.0); }});
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n, double ridge) {
    std::normal_distribution<double> dist;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = dist(rng);
    return a * a.transpose() / n + ridge * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("correlation of the constant basis is [1]") {
    Trajectory t = vac::simulate_ou(50.0, 0.1, 2);
    for (double lag : {0.0, 0.5, 2.0}) {
        Eigen::MatrixXd c = vac::estimate_correlation(t, constant_basis(), lag);
        REQUIRE(c.rows() == 1);
        CHECK(c(0, 0) == Catch::Approx(1.0).margin(1e-14));
    }
}

TEST_CASE("lag-zero indicator correlation is the diagonal of occupation frequencies") {
    Trajectory t = vac::simulate_ou(100.0, 0.1, 3);
    BasisSet basis = vac::indicator_basis(8, 0.0);
    Eigen::MatrixXd c = vac::estimate_correlation(t, basis, 0.0);
    CHECK((c - Eigen::MatrixXd(c.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.trace() == Catch::Approx(1.0).margin(1e-12));
    CHECK((c.diagonal().array() >= 0.0).all());
}

TEST_CASE("lag-zero occupation frequencies match the cell probabilities") {
    const double delta = 0.1, duration = 1e4;
    Trajectory t = vac::simulate_ou(duration, delta, 5);
    BasisSet basis = vac::indicator_basis(20, 0.1);
    Eigen::MatrixXd c = vac::estimate_correlation(t, basis, 0.0);
    const auto n = t.count();
    // integrated autocorrelation of an indicator under the slowest mode
    double iac = (1.0 + std::exp(-delta)) / (1.0 - std::exp(-delta));
    double prev = 0.0;
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
        double hi = i + 1 < basis.size() ? vac::normal_cdf(basis.boundaries()[i]) : 1.0;
        double p = hi - prev;
        prev = hi;
        double se = std::sqrt(p * (1 - p) * iac / n);
        CHECK(std::abs(c(i, i) - p) < 3.5 * se);
    }
}

TEST_CASE("correlation estimator rejects bad lags") {
    Trajectory t = vac::simulate_ou(10.0, 0.1, 2);
    BasisSet basis = vac::indicator_basis(4, 0.0);
    CHECK_THROWS_AS(vac::estimate_correlation(t, basis, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(vac::estimate_correlation(t, basis, 0.15), std::invalid_argument);
    CHECK_THROWS_AS(vac::estimate_correlation(t, basis, -0.1), std::invalid_argument);
}

TEST_CASE("equal correlation matrices give unit eigenvalues") {
    std::mt19937_64 rng(4);
    Eigen::MatrixXd c0 = random_spd(rng, 6, 0.3);
    vac::VacSolution sol = vac::solve_vac({c0, c0, 0.5, {}});
    for (Eigen::Index i = 0; i < sol.retained; ++i)
        CHECK(sol.eigenvalues[i] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("exact first three eigenvalues from the quadrature-exact matrices") {
    vac::OuOracle oracle(6);
    BasisSet basis = hermite_basis_3();
    for (double tau : {0.2, 0.5, 1.0}) {
        CorrelationPair pair{oracle.ideal_correlation(basis, 0.0),
                             oracle.ideal_correlation(basis, tau), tau, {}};
        vac::VacSolution sol = vac::solve_vac(pair);
        REQUIRE(sol.retained == 3);
        CHECK(sol.eigenvalues[0] == Catch::Approx(1.0).margin(1e-8));
        CHECK(sol.eigenvalues[1] == Catch::Approx(std::exp(-tau)).margin(1e-8));
        CHECK(sol.eigenvalues[2] == Catch::Approx(std::exp(-2 * tau)).margin(1e-8));
    }
}

TEST_CASE("idealized second eigenvalue obeys the variational sandwich at tau 0.7") {
    BasisSet basis = vac::indicator_basis(20, 0.1);
    vac::OuOracle oracle(8, &basis);
    const double tau = 0.7;
    CorrelationPair pair{oracle.ideal_correlation(basis, 0.0),
                         oracle.ideal_correlation(basis, tau), tau, {}};
    vac::VacSolution sol = vac::solve_vac(pair);
    double ratio = sol.eigenvalues[1] / std::exp(-tau);
    CHECK(ratio <= 1.0 + 1e-10);
    auto d = vac::subspace_distances(
        {oracle.reference().eigenfunctions.leftCols(2), oracle.reference().gram()},
        {oracle.basis_nodes(basis), oracle.reference().gram()});
    CHECK(ratio >= 1.0 - d.gap * d.gap - 1e-10);
}

TEST_CASE("whitened solve matches the generalized eigensolver on random SPD pairs") {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 100; ++rep) {
        Eigen::Index n = 4 + static_cast<Eigen::Index>(rng() % 5);
        Eigen::MatrixXd c0 = random_spd(rng, n, 0.5);
        Eigen::MatrixXd ct = random_spd(rng, n, 0.1);
        vac::VacSolution sol = vac::solve_vac({c0, ct, 1.0, {}});
        REQUIRE(sol.retained == n);

        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(ct, c0);
        for (Eigen::Index i = 0; i < n; ++i)
            CHECK(sol.eigenvalues[i] ==
                  Catch::Approx(ges.eigenvalues()[n - 1 - i]).margin(1e-8));
        // C(0)-orthonormality of the returned coefficients
        Eigen::MatrixXd overlap = sol.coeffs.transpose() * c0 * sol.coeffs;
        CHECK((overlap - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
        // diagonalization of C(tau) with the eigenvalues on the diagonal
        Eigen::MatrixXd diag = sol.coeffs.transpose() * ct * sol.coeffs;
        diag.diagonal() -= sol.eigenvalues;
        CHECK(diag.cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("refining the indicator basis never lowers retained eigenvalues") {
    // n = 20 boundaries contain the n = 10 boundaries at equal offset
    BasisSet coarse = vac::indicator_basis(10, 0.1);
    BasisSet fine = vac::indicator_basis(20, 0.1);
    vac::OuOracle oc(6, &coarse), of(6, &fine);
    const double tau = 0.5;
    vac::VacSolution a = vac::solve_vac(
        {oc.ideal_correlation(coarse, 0.0), oc.ideal_correlation(coarse, tau), tau, {}});
    vac::VacSolution b = vac::solve_vac(
        {of.ideal_correlation(fine, 0.0), of.ideal_correlation(fine, tau), tau, {}});
    for (Eigen::Index i = 0; i < a.retained; ++i)
        CHECK(b.eigenvalues[i] >= a.eigenvalues[i] - 1e-12);
    // exact-matrix eigenvalues live in [0, 1]
    CHECK(b.eigenvalues.minCoeff() > -1e-10);
    CHECK(b.eigenvalues.maxCoeff() < 1.0 + 1e-10);
}

TEST_CASE("empty cells are dropped with a record, not an error") {
    Eigen::MatrixXd states = Eigen::MatrixXd::Zero(200, 1);  // never leaves one cell
    Trajectory t(states, 0.1);
    BasisSet basis = vac::indicator_basis(6, 0.0);
    CorrelationPair pair = vac::make_correlation_pair(t, basis, 0.5);
    vac::VacSolution sol = vac::solve_vac(pair);
    CHECK(sol.retained == 1);
    CHECK(sol.dropped.size() == 5);
}

TEST_CASE("numerically zero mass matrix is rejected") {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
    CHECK_THROWS_AS(vac::solve_vac({z, z, 0.5, {}}), vac::singular_mass_matrix_error);
}

TEST_CASE("asymmetric input is rejected") {
    Eigen::MatrixXd c0 = Eigen::MatrixXd::Identity(3, 3);
    Eigen::MatrixXd ct = c0;
    ct(0, 1) = 0.5;  // not mirrored
    CHECK_THROWS_AS(vac::solve_vac({c0, ct, 0.5, {}}), std::invalid_argument);
}

TEST_CASE("eigenfunction series: constant mode, normalization, autocorrelation identity") {
    const double tau = 0.5;
    Trajectory t = vac::simulate_ou(2000.0, 0.1, 8);
    BasisSet basis = vac::indicator_basis(20, 0.1);
    CorrelationPair pair = vac::make_correlation_pair(t, basis, tau);
    vac::VacSolution sol = vac::solve_vac(pair);

    // the top sampled eigenfunction is the constant 1 up to sampling noise
    Eigen::VectorXd first = vac::eigenfunction_series(sol, basis, 1, t);
    for (Eigen::Index s = 0; s < t.count(); ++s)
        CHECK(first[s] == Catch::Approx(1.0).margin(5e-3));

    Eigen::VectorXd second = vac::eigenfunction_series(sol, basis, 2, t);
    double second_moment = second.squaredNorm() / second.size();
    CHECK(second_moment == Catch::Approx(1.0).margin(1e-8));

    // Rayleigh quotient identity: the empirical lag-tau autocovariance of the
    // series reproduces the eigenvalue
    Eigen::Index lag = t.lag_index(tau);
    Eigen::Index pairs = t.count() - lag;
    double num = 0.0;
    for (Eigen::Index s = 0; s < pairs; ++s) num += second[s] * second[s + lag];
    num /= static_cast<double>(pairs);
    CHECK(num == Catch::Approx(sol.eigenvalues[1]).margin(1e-10));

    CHECK_THROWS_AS(vac::eigenfunction_series(sol, basis, sol.retained + 1, t),
                    std::invalid_argument);
}

TEST_CASE("implied timescales with in-band markers") {
    vac::VacSolution sol;
    sol.tau = 0.7;
    sol.retained = 4;
    sol.eigenvalues.resize(4);
    sol.eigenvalues << 1.0, std::exp(-2 * 0.7), 1e-12, -0.05;
    Eigen::VectorXd ts = vac::implied_timescales(sol);
    CHECK(std::isinf(ts[0]));
    CHECK(ts[1] == Catch::Approx(0.5).margin(1e-12));
    CHECK(ts[2] > 0.0);
    CHECK(std::isnan(ts[3]));
}
