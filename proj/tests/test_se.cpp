#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>

#include "mamp/channel.hpp"
#include "mamp/modem.hpp"
#include "mamp/se.hpp"

using namespace mamp;

namespace {

SingularSpectrum flat(std::size_t n) { return SingularSpectrum(n, n, std::vector<double>(n, 1.0)); }

// e^2 = {1.6, 0.4} at snr 2.5 is the hand example snr e^2 = {4, 1}.
VseModel hand_model() { return VseModel(SingularSpectrum(2, 2, {std::sqrt(1.6), std::sqrt(0.4)}), 2.5); }

VseModel ill_model(double snr, std::size_t m = 200, std::size_t n = 300, double kappa = 10.0) {
    return VseModel(ill_conditioned_spectrum(m, n, kappa), snr);
}

// Plain bisection on a sign change of f over [lo, hi].
template <class F>
double oracle_root(F f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("LMMSE variance: trivial and hand cases") {
    const VseModel silent(flat(4), 0.0);
    for (double v : {0.1, 1.0, 7.0}) {
        CHECK(gamma_hat_se(v, silent) == doctest::Approx(v).epsilon(1e-15));
        CHECK(gamma_hat_se_inv(v, silent) == v);
        CHECK(eta_se(v, silent) == 0.0);
    }
    const VseModel unit(flat(8), 3.0);
    for (double v : {0.01, 0.5, 1.0, 100.0}) {
        CHECK(gamma_hat_se(v, unit) == doctest::Approx(1.0 / (3.0 + 1.0 / v)).epsilon(1e-14));
    }
    const auto hand = hand_model();
    CHECK(gamma_hat_se(1.0, hand) == doctest::Approx(0.35).epsilon(1e-14));
    CHECK(gamma_hat_se_inv(0.35, hand) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(eta_se(0.35, hand) == doctest::Approx(1.0 / 0.35 - 1.0).epsilon(1e-10));
    CHECK_THROWS_AS(gamma_hat_se(0.0, hand), std::domain_error);
    CHECK_THROWS_AS(gamma_hat_se(-1.0, hand), std::domain_error);
}

TEST_CASE("LMMSE variance against a dense trace") {
    const auto ch = gen_ill_conditioned(6, 9, 10.0, 5);
    const VseModel model(ch.spectrum(), 4.0);
    const Eigen::MatrixXcd gram = ch.dense().adjoint() * ch.dense();
    for (double v : {0.05, 0.4, 2.0}) {
        const Eigen::MatrixXcd k = 4.0 * gram + Eigen::MatrixXcd::Identity(9, 9) / v;
        const double trace = k.inverse().trace().real() / 9.0;
        CHECK(gamma_hat_se(v, model) == doctest::Approx(trace).epsilon(1e-12));
    }
}

TEST_CASE("LMMSE variance is strictly increasing and below the prior") {
    for (const auto& model : {ill_model(10.0), ill_model(10.0, 300, 200), hand_model()}) {
        double prev = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double v = std::pow(10.0, -4.0 + 8.0 * i / 999.0);
            const double g = gamma_hat_se(v, model);
            CHECK(g > prev);
            CHECK(g <= v);
            prev = g;
        }
    }
}

TEST_CASE("inverse LMMSE variance") {
    const VseModel unit(flat(4), 3.0);
    for (double vhat : {1e-4, 0.1, 0.3}) {
        // Closed form of 1/(snr + 1/v) = vhat.
        CHECK(gamma_hat_se_inv(vhat, unit) == doctest::Approx(1.0 / (1.0 / vhat - 3.0)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(gamma_hat_se_inv(1.0 / 3.0, unit), std::domain_error);
    CHECK_THROWS_AS(gamma_hat_se_inv(0.0, unit), std::domain_error);
    for (const auto& model : {ill_model(10.0), ill_model(0.5, 300, 200), hand_model()}) {
        CHECK(gamma_hat_se_inv(gamma_hat_se(1.0, model), model) == doctest::Approx(1.0).epsilon(1e-11));
        for (double x : {1e-5, 1e-2, 0.09, 0.3}) {
            if (x < model.gamma_hat_limit()) {
                CHECK(std::abs(gamma_hat_se(gamma_hat_se_inv(x, model), model) - x) <= 1e-10 * x);
            }
        }
    }
}

TEST_CASE("extrinsic SINR and its inverse") {
    const VseModel unit(flat(16), 5.0);
    for (double v : {1e-3, 0.1, 0.19}) {
        CHECK(eta_se(v, unit) == doctest::Approx(5.0).epsilon(1e-9));
    }
    // Flat convention: no constraint below snr, wall at snr.
    CHECK(eta_se_inv(5.0, unit) == 0.0);
    CHECK(eta_se_inv(2.0, unit) == doctest::Approx(0.5));
    CHECK(eta_se_inv(2.0, unit) > 1.0 / (1.0 + 2.0));

    const VseModel quiet(ill_conditioned_spectrum(200, 300, 10.0), 1e-9);
    CHECK(eta_se(0.5, quiet) < 1e-8);

    const auto model = ill_model(10.0);
    for (double v : {1e-4, 0.01, 0.2, 0.9}) {
        CHECK(eta_se(v, model) > 0.0);
        CHECK(eta_se(v, model) < 10.0);
    }
    CHECK(eta_se(0.0, model) == doctest::Approx(10.0));
    for (double rho : {1e-3, 0.5, 3.0, 9.0, 9.99}) {
        CHECK(std::abs(eta_se(eta_se_inv(rho, model), model) - rho) < 1e-9);
    }
    const auto curve = eta_inv_curve(model, linear_grid(0.05, 10.0, 200));
    CHECK(curve.is_monotone());
    CHECK_THROWS_AS(eta_se_inv(0.0, model), std::domain_error);
    CHECK_THROWS_AS(eta_se_inv(10.5, model), std::domain_error);

    // Full-rank tall channel: curve continues as 1/rho below the floor.
    const auto tall = ill_model(10.0, 300, 200);
    CHECK(tall.sinr_floor() > 0.0);
    const double floor = tall.sinr_floor();
    CHECK(eta_se_inv(0.5 * floor, tall) == doctest::Approx(2.0 / floor));
    CHECK(eta_se_inv(floor * (1 + 1e-6), tall) == doctest::Approx(1.0 / floor).epsilon(1e-4));
}

TEST_CASE("curves depend on the spectrum only") {
    const auto a = gen_ill_conditioned(40, 60, 10.0, 1);
    const auto b = gen_ill_conditioned(40, 60, 10.0, 2);
    REQUIRE(a.spectrum() == b.spectrum());
    CHECK((a.u() - b.u()).norm() > 1e-3);
    const auto grid = linear_grid(0.1, 8.0, 50);
    const auto ca = eta_inv_curve(VseModel(a.spectrum(), 8.0), grid);
    const auto cb = eta_inv_curve(VseModel(b.spectrum(), 8.0), grid);
    CHECK(ca.y() == cb.y());
}

TEST_CASE("state-evolution trajectories") {
    SUBCASE("Gaussian input on a unitary channel settles immediately") {
        const VseModel unit(flat(8), 4.0);
        const auto tr = vse_trajectory(unit, [](double rho) { return 1.0 / (1.0 + rho); }, 50);
        REQUIRE(tr.steps.size() >= 2);
        CHECK(tr.steps[0].v == doctest::Approx(0.2));
        CHECK(tr.steps[1].v == doctest::Approx(0.2));
        CHECK(tr.converged);
        CHECK(tr.limit.rho_star == doctest::Approx(4.0));
    }
    SUBCASE("open tunnel drives the variance to zero") {
        const auto model = ill_model(10.0);
        auto phi = [&](double rho) { return rho < 5.0 ? 0.5 * std::min(1.0, eta_se_inv(rho, model)) : 0.0; };
        const auto tr = vse_trajectory(model, phi, 500);
        CHECK(tr.converged);
        CHECK(tr.limit.v_star == 0.0);
    }
    SUBCASE("uncoded QPSK fixed point equals the direct crossing") {
        const auto model = ill_model(10.0);
        const auto qpsk = Constellation::qpsk();
        auto phi = [&](double rho) { return mmse_exact(rho, qpsk); };
        auto gap = [&](double rho) { return phi(rho) - eta_se_inv(rho, model); };
        // Bracket by a coarse scan above the first-pass SINR.
        double lo = model.extrinsic_sinr(1.0);
        double hi = lo;
        while (gap(hi) < 0.0) {
            lo = hi;
            hi *= 1.05;
        }
        const double direct = oracle_root(gap, lo, hi);
        const auto fp = vse_fixed_point(model, phi);
        CHECK(std::abs(fp.rho_star - direct) < 1e-9 * direct);
        CHECK(fp.v_star > 0.0);
        CHECK(eta_se(fp.v_star, model) == doctest::Approx(fp.rho_star).epsilon(1e-8));
        const auto tr = vse_trajectory(model, phi, 5000);
        CHECK(tr.converged);
        CHECK(tr.limit.rho_star == doctest::Approx(fp.rho_star).epsilon(1e-6));
    }
}
