#include <catch2/catch_amalgamated.hpp>

#include "test_oracles.hpp"
#include "vac/normal.hpp"

TEST_CASE("normal cdf basics") {
    CHECK(vac::normal_cdf(0.0) == Catch::Approx(0.5).margin(1e-15));
    CHECK(vac::normal_cdf(1.0) + vac::normal_cdf(-1.0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(vac::normal_cdf(-40.0) == Catch::Approx(0.0).margin(1e-300));
}

TEST_CASE("quantile inverts the cdf to high accuracy") {
    for (double p : {1e-8, 1e-4, 0.01, 0.1, 0.25, 0.5, 0.6, 0.9, 0.999, 1.0 - 1e-9}) {
        double x = vac::normal_quantile(p);
        CHECK(vac::normal_cdf(x) == Catch::Approx(p).margin(1e-13));
    }
}

TEST_CASE("quantile matches series-bisection oracle") {
    CHECK(vac::normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-13));
    // frozen from the erf-series bisection oracle
    double q75 = oracle::normal_quantile_bisect(0.75);
    CHECK(q75 == Catch::Approx(0.674490).margin(1e-6));
    for (double p : {0.05, 0.25, 0.75, 0.9}) {
        CHECK(vac::normal_quantile(p) ==
              Catch::Approx(oracle::normal_quantile_bisect(p)).margin(1e-12));
    }
}

TEST_CASE("quantile rejects out-of-range input") {
    CHECK_THROWS_AS(vac::normal_quantile(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(vac::normal_quantile(1.5), std::invalid_argument);
    CHECK(std::isinf(vac::normal_quantile(0.0)));
    CHECK(std::isinf(vac::normal_quantile(1.0)));
}
