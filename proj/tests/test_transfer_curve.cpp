#include "doctest.h"

#include <cmath>
#include <sstream>

#include "mamp/transfer_curve.hpp"

using namespace mamp;

TEST_CASE("interpolation and clamping") {
    const TransferCurve c({0, 1, 3}, {1, 0.5, 0.1});
    CHECK(c(-1) == 1.0);
    CHECK(c(0.5) == doctest::Approx(0.75));
    CHECK(c(2) == doctest::Approx(0.3));
    CHECK(c(10) == 0.1);
    CHECK(c.is_monotone());
}

TEST_CASE("rejects unsorted abscissas") {
    CHECK_THROWS_AS(TransferCurve({0, 0}, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(TransferCurve({0, 1}, {1}), std::invalid_argument);
}

TEST_CASE("integral of piecewise-linear toy curve") {
    // Hand trapezoid: [0,1] -> 0.75, [1,3] -> 0.6, total 1.35.
    const TransferCurve c({0, 1, 3}, {1, 0.5, 0.1});
    CHECK(c.integrate(0, 3) == doctest::Approx(1.35).epsilon(1e-12));
    CHECK(c.integrate(0.5, 2) == doctest::Approx(0.5 * 0.5 * (0.75 + 0.5) + 0.5 * (0.5 + 0.3)).epsilon(1e-12));
}

TEST_CASE("first crossing") {
    const TransferCurve c({0, 1, 2}, {1, 0.5, 0.0});
    CHECK(c.first_crossing(0.75) == doctest::Approx(0.5));
    CHECK(c.first_crossing(-1.0) == 2.0);
    const TransferCurve up({0, 1}, {0, 1}, Monotonicity::nondecreasing);
    CHECK(up.first_crossing(0.25) == doctest::Approx(0.25));
}

TEST_CASE("monotone smoothing pools violators") {
    const TransferCurve noisy({0, 1, 2, 3}, {1.0, 0.6, 0.7, 0.2});
    CHECK_FALSE(noisy.is_monotone());
    const auto s = noisy.monotone_smoothed();
    CHECK(s.is_monotone());
    CHECK(s.y()[1] == doctest::Approx(0.65));
    CHECK(s.y()[2] == doctest::Approx(0.65));
    // A violation inside three standard errors is tolerated.
    const TransferCurve jitter({0, 1}, {0.5, 0.51}, Monotonicity::nonincreasing, {0.01, 0.01});
    CHECK(jitter.is_monotone());
}

TEST_CASE("grids") {
    const auto g = log_grid(1e-4, 1e2, 7);
    CHECK(g.front() == 1e-4);
    CHECK(g.back() == 1e2);
    CHECK(g[1] == doctest::Approx(1e-3));
    CHECK(linear_grid(0, 1, 5)[2] == 0.5);
    CHECK_THROWS(log_grid(0, 1, 3));
}

TEST_CASE("csv export") {
    std::ostringstream os;
    TransferCurve({0, 1}, {1, 0.5}).write_csv(os, "rho", "mmse");
    CHECK(os.str() == "rho,mmse\n0,1\n1,0.5\n");
}
