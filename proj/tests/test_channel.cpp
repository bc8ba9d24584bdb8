#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "mamp/channel.hpp"

using namespace mamp;

namespace {

double unitary_deviation(const CMatrix& q) {
    const CMatrix d = q.adjoint() * q - CMatrix::Identity(q.cols(), q.cols());
    return d.cwiseAbs().maxCoeff();
}

// Quarter-circle CDF of singular values at beta = 1, integrated numerically
// from the density (1/pi) sqrt(4 - s^2) on [0, 2].
double quarter_circle_cdf(double s) {
    s = std::clamp(s, 0.0, 2.0);
    const int steps = 4000;
    const double h = s / steps;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double x = i * h;
        const double f = std::sqrt(std::max(0.0, 4.0 - x * x)) / M_PI;
        acc += (i == 0 || i == steps) ? 0.5 * f : f;
    }
    return acc * h;
}

} // namespace

TEST_CASE("iid channel: 1x1 has unit gain") {
    const auto ch = gen_iid_gaussian(1, 1, 7);
    CHECK(std::norm(ch.dense()(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("iid channel: load and normalization") {
    const auto ch = gen_iid_gaussian(200, 300, 11);
    CHECK(ch.spectrum().beta() == 1.5);
    CHECK(ch.spectrum().rank_dim() == 200);
    CHECK(std::abs(ch.dense().squaredNorm() / 300.0 - 1.0) < 1e-9);
    CHECK(unitary_deviation(ch.u()) < 1e-9);
    CHECK(unitary_deviation(ch.v()) < 1e-9);
    Eigen::JacobiSVD<CMatrix> svd(ch.dense());
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        CHECK(std::abs(svd.singularValues()(i) - ch.spectrum().values()[static_cast<std::size_t>(i)]) < 1e-8);
    }
}

TEST_CASE("iid channel: square spectrum follows the quarter-circle law") {
    const auto ch = gen_iid_gaussian(256, 256, 3);
    auto e = ch.spectrum().values();
    std::sort(e.begin(), e.end());
    double ks = 0.0;
    const double count = static_cast<double>(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double f = quarter_circle_cdf(e[i]);
        ks = std::max({ks, std::abs(f - i / count), std::abs(f - (i + 1) / count)});
    }
    CHECK(ks < 0.1);
}

TEST_CASE("iid channel: deterministic in seed") {
    const auto a = gen_iid_gaussian(8, 5, 42);
    const auto b = gen_iid_gaussian(8, 5, 42);
    const auto c = gen_iid_gaussian(8, 5, 43);
    CHECK(a.dense() == b.dense());
    CHECK(a.dense() != c.dense());
}

TEST_CASE("ill-conditioned ladder") {
    SUBCASE("kappa 1 is flat") {
        const auto ch = gen_ill_conditioned(4, 4, 1.0, 1);
        for (double e : ch.spectrum().values()) {
            CHECK(e == doctest::Approx(1.0).epsilon(1e-14));
        }
        CHECK(ch.spectrum().is_flat());
    }
    SUBCASE("two-term system, kappa 4") {
        const auto s = ill_conditioned_spectrum(2, 2, 4.0);
        CHECK(s.values()[0] == doctest::Approx(std::sqrt(8.0 / 5.0)).epsilon(1e-14));
        CHECK(s.values()[1] == doctest::Approx(std::sqrt(2.0 / 5.0)).epsilon(1e-14));
    }
    SUBCASE("wide channel, kappa 9") {
        const auto ch = gen_ill_conditioned(2, 3, 9.0, 5);
        const auto& e = ch.spectrum().values();
        REQUIRE(e.size() == 2);
        CHECK(e[0] == doctest::Approx(std::sqrt(2.7)).epsilon(1e-14));
        CHECK(e[1] == doctest::Approx(std::sqrt(0.3)).epsilon(1e-14));
        CHECK(std::abs(ch.dense().squaredNorm() / 3.0 - 1.0) < 1e-9);
        Eigen::JacobiSVD<CMatrix> svd(ch.dense());
        CHECK(std::abs(svd.singularValues()(0) - e[0]) < 1e-8);
        CHECK(std::abs(svd.singularValues()(1) - e[1]) < 1e-8);
    }
    SUBCASE("ratio between neighbours") {
        const auto s = ill_conditioned_spectrum(64, 96, 10.0);
        for (std::size_t i = 1; i < s.values().size(); ++i) {
            CHECK(s.values()[i - 1] / s.values()[i] == doctest::Approx(std::pow(10.0, 1.0 / 64)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(gen_ill_conditioned(4, 4, 0.5, 1), std::domain_error);
}

TEST_CASE("ill-conditioned: unitary factors and assembled spectrum") {
    const auto ch = gen_ill_conditioned(48, 32, 50.0, 9);
    CHECK(unitary_deviation(ch.u()) < 1e-9);
    CHECK(unitary_deviation(ch.v()) < 1e-9);
    Eigen::JacobiSVD<CMatrix> svd(ch.dense());
    for (Eigen::Index i = 0; i < 32; ++i) {
        CHECK(std::abs(svd.singularValues()(i) - ch.spectrum().values()[static_cast<std::size_t>(i)]) < 1e-8);
    }
}

TEST_CASE("spectral moments") {
    SUBCASE("flat") {
        const auto mom = spectral_moments(SingularSpectrum(3, 3, {1, 1, 1}), 4);
        CHECK(mom.lambda_dagger == 1.0);
        for (std::size_t k = 1; k <= 4; ++k) {
            CHECK(mom.b[k] == doctest::Approx(0.0));
        }
    }
    SUBCASE("2x2") {
        // n = 5 makes e^2 = {4, 1} a valid normalized spectrum with m = 2.
        const auto raw = spectral_moments(SingularSpectrum(2, 5, {2, 1}), 2);
        CHECK(raw.lambda_dagger == 2.5);
        CHECK(raw.b[1] == doctest::Approx(0.0));
        CHECK(raw.b[2] == doctest::Approx(2.25));
        CHECK(raw.b[0] == 1.0);
    }
    SUBCASE("tall, zero padded") {
        // e^2 = {4, 1} scaled by 0.4 to meet sum(e^2) = n = 2; b_1 is linear in the scale.
        const auto mom = spectral_moments(SingularSpectrum(3, 2, {std::sqrt(1.6), std::sqrt(0.4)}), 1);
        CHECK(mom.lambda_min == 0.0);
        CHECK(mom.lambda_dagger == doctest::Approx(0.8));
        CHECK(mom.b[1] == doctest::Approx(0.4 / 3.0));
    }
    CHECK_THROWS_AS(spectral_moments(SingularSpectrum(2, 2, {1, 1}), 0), std::invalid_argument);
}

TEST_CASE("spectral moments are bounded by the half-width") {
    const auto s = ill_conditioned_spectrum(40, 60, 50.0);
    const auto mom = spectral_moments(s, 12);
    const double half = (mom.lambda_max - mom.lambda_min) / 2.0;
    CHECK(mom.lambda_dagger == (mom.lambda_min + mom.lambda_max) / 2.0);
    for (std::size_t k = 0; k <= 12; ++k) {
        CHECK(std::abs(mom.b[k]) <= std::pow(half, static_cast<double>(k)) * (1 + 1e-12));
    }
}

TEST_CASE("spectrum text round trip") {
    const auto s = ill_conditioned_spectrum(5, 7, 10.0);
    std::stringstream io;
    write_spectrum(io, s);
    CHECK(read_spectrum(io) == s);
    std::stringstream bad("3 3\n1 1");
    CHECK_THROWS_AS(read_spectrum(bad), std::runtime_error);
}
