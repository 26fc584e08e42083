#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "test_oracles.hpp"
#include "vac/basis.hpp"
#include "vac/grid_oracle.hpp"
#include "vac/vac_core.hpp"

using vac::BasisSet;
using vac::DoubleWellGridOracle;
using vac::DoubleWellGridSpec;

namespace {

DoubleWellGridSpec coarse_spec(double spacing) {
    DoubleWellGridSpec spec;
    spec.spacing = spacing;
    return spec;
}

// Hopping probability written straight from the definition.
double hop_probability(double from_x, double from_y, double to_x, double to_y) {
    double du = vac::double_well_potential(to_x, to_y) -
                vac::double_well_potential(from_x, from_y);
    return 1.0 / (6.0 * (1.0 + std::exp(du)));
}

}  // namespace

TEST_CASE("hopping rows are stochastic and detailed balance holds edgewise") {
    DoubleWellGridOracle oracle(coarse_spec(0.25), 4);
    const auto& ref = oracle.reference();
    const Eigen::Index n = oracle.node_count();
    const Eigen::VectorXd& mu = oracle.stationary();

    for (Eigen::Index z = 0; z < n; z += 7) {
        Eigen::VectorXd row = oracle.p_row(z);
        CHECK(row.sum() == Catch::Approx(1.0).margin(1e-12));
        CHECK((row.array() >= -1e-15).all());
    }

    // independent reconstruction of the edge probabilities on every edge,
    // checking mu(x) P(x,y) = mu(y) P(y,x) with mu proportional to exp(-U)
    const double eps = oracle.spec().spacing;
    double max_db_violation = 0.0;
    for (Eigen::Index z = 0; z < n; ++z) {
        double x = ref.nodes(z, 0), y = ref.nodes(z, 1);
        Eigen::VectorXd row = oracle.p_row(z);
        for (auto [dx, dy] : {std::pair{1, 0}, {0, 1}, {1, 1}}) {
            double tx = x + dx * eps, ty = y + dy * eps;
            if (tx > oracle.spec().x_max + 1e-9 || ty > oracle.spec().y_max + 1e-9) continue;
            Eigen::Index t = z + dx * static_cast<Eigen::Index>(
                                      std::llround((oracle.spec().y_max - oracle.spec().y_min) /
                                                   eps) + 1) + dy;
            double fwd = hop_probability(x, y, tx, ty);
            double bwd = hop_probability(tx, ty, x, y);
            CHECK(row[t] == Catch::Approx(fwd).margin(1e-13));
            max_db_violation =
                std::max(max_db_violation, std::abs(mu[z] * fwd - mu[t] * bwd) /
                                               std::max(mu[z] * fwd, 1e-300));
        }
        // anti-correlated diagonal hops are forbidden
        double txm = x + eps, tym = y - eps;
        if (txm <= oracle.spec().x_max + 1e-9 && tym >= oracle.spec().y_min - 1e-9) {
            Eigen::Index t = z + static_cast<Eigen::Index>(
                                  std::llround((oracle.spec().y_max - oracle.spec().y_min) /
                                               eps) + 1) - 1;
            CHECK(row[t] == 0.0);
        }
    }
    CHECK(max_db_violation < 1e-10);
}

TEST_CASE("stationary measure is the left eigenvector of the hopping matrix") {
    DoubleWellGridOracle oracle(coarse_spec(0.25), 4);
    Eigen::VectorXd mu = oracle.stationary();
    Eigen::VectorXd mu_p = oracle.left_apply(mu);
    CHECK((mu_p - mu).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(mu.sum() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("leading mode is stationary with the constant eigenfunction") {
    DoubleWellGridOracle oracle(coarse_spec(0.2), 4);
    const auto& ref = oracle.reference();
    CHECK(ref.sigmas[0] == 0.0);
    CHECK((ref.eigenfunctions.col(0).array() - 1.0).abs().maxCoeff() < 1e-6);
    // mu-orthonormality of the computed eigenfunctions
    Eigen::MatrixXd overlap = ref.eigenfunctions.transpose() * ref.weights.asDiagonal() *
                              ref.eigenfunctions;
    CHECK((overlap - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
    // decay rates come out sorted
    for (Eigen::Index i = 1; i < ref.num_modes(); ++i)
        CHECK(ref.sigmas[i] >= ref.sigmas[i - 1]);
    CHECK(ref.tail_sigma >= ref.sigmas[ref.num_modes() - 1]);
}

TEST_CASE("grid self-consistency: halving the spacing barely moves the slow rates") {
    DoubleWellGridOracle coarse(coarse_spec(0.1), 4);
    DoubleWellGridOracle fine(coarse_spec(0.05), 4);
    double s2c = coarse.reference().sigmas[1], s2f = fine.reference().sigmas[1];
    double s3c = coarse.reference().sigmas[2], s3f = fine.reference().sigmas[2];
    CHECK(std::abs(s2c - s2f) < 0.05 * s2f);
    CHECK(std::abs(s3c - s3f) < 0.05 * s3f);
    // the slow barrier-crossing rate for this potential
    CHECK(s2f == Catch::Approx(0.625).margin(0.02));
    CHECK(s3f == Catch::Approx(3.03).margin(0.1));
}

TEST_CASE("ideal correlation from the grid: invariance of constants") {
    DoubleWellGridOracle oracle(coarse_spec(0.1), 4);
    BasisSet constant = BasisSet::custom(2, {[](const Eigen::VectorXd&) { return 1.0; }});
    CHECK(oracle.ideal_correlation(constant, 0.0)(0, 0) == Catch::Approx(1.0).margin(1e-12));
    BasisSet poly = vac::polynomial_basis_2d();
    for (double tau : {0.0, 0.3}) {
        Eigen::MatrixXd c = oracle.ideal_correlation(poly, tau);
        CHECK(c(0, 0) == Catch::Approx(1.0).margin(1e-10));
        CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("grid-ideal eigenvalues live in the unit interval") {
    DoubleWellGridOracle oracle(coarse_spec(0.1), 4);
    BasisSet poly = vac::polynomial_basis_2d();
    auto cs = oracle.ideal_correlation_sweep(poly, {0.2, 0.5});
    Eigen::MatrixXd c0 = oracle.ideal_correlation(poly, 0.0);
    for (const Eigen::MatrixXd& ct : cs) {
        vac::VacSolution sol = vac::solve_vac({c0, ct, 0.0, {}});
        CHECK(sol.eigenvalues.minCoeff() > -1e-8);
        CHECK(sol.eigenvalues.maxCoeff() < 1.0 + 1e-8);
    }
}

TEST_CASE("spectral expansion of the grid correlation matches the power walk") {
    DoubleWellGridOracle oracle(coarse_spec(0.1), 6);
    const auto& ref = oracle.reference();
    BasisSet poly = vac::polynomial_basis_2d();
    Eigen::MatrixXd phi = oracle.basis_nodes(poly);
    Eigen::MatrixXd overlaps = ref.eigenfunctions.transpose() * ref.weights.asDiagonal() * phi;
    Eigen::MatrixXd c0 = oracle.ideal_correlation(poly, 0.0);
    const double tau = 0.6;
    Eigen::MatrixXd direct = oracle.ideal_correlation(poly, tau);
    Eigen::MatrixXd expansion = Eigen::MatrixXd::Zero(6, 6);
    for (Eigen::Index l = 0; l < ref.num_modes(); ++l)
        expansion += std::exp(-ref.sigmas[l] * tau) * overlaps.row(l).transpose() *
                     overlaps.row(l);
    double tail = ref.tail_rate(tau);
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < 6; ++j)
            CHECK(std::abs(direct(i, j) - expansion(i, j)) <=
                  tail * std::sqrt(c0(i, i) * c0(j, j)) + 1e-8);
}

TEST_CASE("too-coarse grids are rejected") {
    DoubleWellGridSpec spec;
    spec.spacing = 2.0;  // 3 x 6 nodes cannot resolve 12 modes
    CHECK_THROWS_AS(DoubleWellGridOracle(spec, 12), vac::resolution_error);
}

TEST_CASE("mode cache round-trips") {
    DoubleWellGridSpec spec = coarse_spec(0.25);
    DoubleWellGridOracle a(spec, 3);
    std::stringstream buffer;
    a.save_modes(buffer);
    DoubleWellGridOracle b(spec, 3, false);
    REQUIRE(b.load_modes(buffer));
    CHECK(b.reference().sigmas == a.reference().sigmas);
    CHECK(b.reference().eigenfunctions == a.reference().eigenfunctions);
}
