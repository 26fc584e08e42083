#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "test_oracles.hpp"
#include "vac/normal.hpp"
#include "vac/ou_oracle.hpp"

using vac::BasisSet;
using vac::OuOracle;

namespace {

// E[x^{2k}] under N(0,1) by the double-factorial recurrence.
double gaussian_even_moment(int k) {
    double m = 1.0;
    for (int i = 1; i <= k; ++i) m *= 2 * i - 1;
    return m;
}

}  // namespace

TEST_CASE("hermite eigenfunctions are mu-orthonormal on the quadrature nodes") {
    BasisSet basis = vac::indicator_basis(20, 0.1);
    OuOracle oracle(12, &basis);
    const auto& ref = oracle.reference();
    Eigen::MatrixXd overlap = ref.eigenfunctions.transpose() * ref.weights.asDiagonal() *
                              ref.eigenfunctions;
    CHECK((overlap - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(ref.sigmas[0] == 0.0);
    CHECK(ref.sigmas[3] == 3.0);
    CHECK((ref.eigenfunctions.col(0).array() == 1.0).all());
}

TEST_CASE("specific mu inner products against exact Gaussian moments") {
    OuOracle oracle(6);
    const auto& ref = oracle.reference();
    const Eigen::VectorXd& w = ref.weights;
    auto inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return a.dot(w.cwiseProduct(b));
    };
    CHECK(inner(ref.eigenfunctions.col(1), ref.eigenfunctions.col(2)) ==
          Catch::Approx(0.0).margin(1e-10));
    CHECK(inner(ref.eigenfunctions.col(2), ref.eigenfunctions.col(2)) ==
          Catch::Approx(1.0).margin(1e-10));
    // <x^2, (x^2-1)/sqrt(2)> = (E x^4 - E x^2)/sqrt(2) = sqrt(2)
    Eigen::VectorXd x2 = ref.nodes.col(0).cwiseAbs2();
    double expected = (gaussian_even_moment(2) - gaussian_even_moment(1)) / std::sqrt(2.0);
    CHECK(expected == Catch::Approx(std::sqrt(2.0)).margin(1e-15));
    CHECK(inner(x2, ref.eigenfunctions.col(2)) == Catch::Approx(expected).margin(1e-10));
}

TEST_CASE("lag-zero ideal correlation is the diagonal of cell masses") {
    BasisSet basis = vac::indicator_basis(10, 0.1);
    OuOracle oracle(6, &basis);
    Eigen::MatrixXd c0 = oracle.ideal_correlation(basis, 0.0);
    double prev = 0.0;
    for (Eigen::Index i = 0; i < basis.size(); ++i) {
        double hi = i + 1 < basis.size() ? vac::normal_cdf(basis.boundaries()[i]) : 1.0;
        CHECK(c0(i, i) == Catch::Approx(hi - prev).margin(1e-13));
        prev = hi;
        for (Eigen::Index j = 0; j < basis.size(); ++j)
            if (i != j) CHECK(c0(i, j) == 0.0);
    }
}

TEST_CASE("rows of the ideal correlation telescope to the cell masses") {
    BasisSet basis = vac::indicator_basis(20, 0.1);
    OuOracle oracle(6, &basis);
    Eigen::VectorXd mass = oracle.ideal_correlation(basis, 0.0).diagonal();
    for (double tau : {0.1, 0.7, 2.0}) {
        Eigen::MatrixXd c = oracle.ideal_correlation(basis, tau);
        CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::VectorXd row_sums = c.rowwise().sum();
        for (Eigen::Index i = 0; i < basis.size(); ++i)
            CHECK(row_sums[i] == Catch::Approx(mass[i]).margin(1e-10));
    }
}

TEST_CASE("long lag decorrelates to the product of masses") {
    BasisSet basis = vac::indicator_basis(8, 0.1);
    OuOracle oracle(6, &basis);
    Eigen::VectorXd mass = oracle.ideal_correlation(basis, 0.0).diagonal();
    const double tau = 20.0;
    Eigen::MatrixXd c = oracle.ideal_correlation(basis, tau);
    for (Eigen::Index i = 0; i < basis.size(); ++i)
        for (Eigen::Index j = 0; j < basis.size(); ++j) {
            double bound = std::exp(-tau) * std::sqrt(mass[i] * mass[j]) + 1e-10;
            CHECK(std::abs(c(i, j) - mass[i] * mass[j]) <= bound);
        }
}

TEST_CASE("spectral expansion reconstructs the ideal correlation within the tail rate") {
    BasisSet basis = vac::indicator_basis(12, 0.1);
    OuOracle oracle(8, &basis);
    const auto& ref = oracle.reference();
    Eigen::MatrixXd phi = oracle.basis_nodes(basis);
    Eigen::MatrixXd overlaps = ref.eigenfunctions.transpose() * ref.weights.asDiagonal() * phi;
    Eigen::VectorXd mass = oracle.ideal_correlation(basis, 0.0).diagonal();
    const double tau = 1.0;
    Eigen::MatrixXd direct = oracle.ideal_correlation(basis, tau);
    Eigen::MatrixXd expansion = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (Eigen::Index l = 0; l < ref.num_modes(); ++l)
        expansion += std::exp(-ref.sigmas[l] * tau) * overlaps.row(l).transpose() *
                     overlaps.row(l);
    double tail = ref.tail_rate(tau);
    for (Eigen::Index i = 0; i < basis.size(); ++i)
        for (Eigen::Index j = 0; j < basis.size(); ++j)
            CHECK(std::abs(direct(i, j) - expansion(i, j)) <=
                  tail * std::sqrt(mass[i] * mass[j]) + 1e-10);
}

TEST_CASE("negative lag is rejected") {
    BasisSet basis = vac::indicator_basis(4, 0.0);
    OuOracle oracle(4, &basis);
    CHECK_THROWS_AS(oracle.ideal_correlation(basis, -0.5), std::invalid_argument);
}

TEST_CASE("generic-basis quadrature path reproduces analytic moments") {
    OuOracle oracle(6);
    BasisSet custom = BasisSet::custom(
        1, {[](const Eigen::VectorXd&) { return 1.0; },
            [](const Eigen::VectorXd& x) { return x[0]; }});
    const double tau = 0.8;
    Eigen::MatrixXd c = oracle.ideal_correlation(custom, tau);
    // <1, T 1> = 1, <1, T x> = 0, <x, T x> = e^{-tau}
    CHECK(c(0, 0) == Catch::Approx(1.0).margin(1e-12));
    CHECK(c(0, 1) == Catch::Approx(0.0).margin(1e-12));
    CHECK(c(1, 1) == Catch::Approx(std::exp(-tau)).margin(1e-12));
}
