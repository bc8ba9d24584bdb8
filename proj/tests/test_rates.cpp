#include "doctest.h"

#include <cmath>

#include "mamp/channel.hpp"
#include "mamp/rates.hpp"

using namespace mamp;

namespace {

SingularSpectrum flat(std::size_t n) { return SingularSpectrum(n, n, std::vector<double>(n, 1.0)); }

} // namespace

TEST_CASE("achievable rate of explicit curves") {
    const TransferCurve zero({0.0, 1.0, 2.0}, {0.0, 0.0, 0.0});
    CHECK(achievable_rate(zero).rate_bits == 0.0);

    // Hand trapezoid: 0.5*(1+0.5)*1 + 0.5*(0.5+0.2)*2 + 0.5*0.2*0.5 = 1.5 nats up to the zero at 3.5.
    const TransferCurve toy({0.0, 1.0, 3.0, 3.5, 5.0}, {1.0, 0.5, 0.2, 0.0, 0.0});
    const auto r = achievable_rate(toy);
    CHECK(r.rho_upper == doctest::Approx(3.5));
    CHECK(std::abs(r.rate_bits - 1.5 / std::log(2.0)) < 1e-9);

    for (double snr : {0.5, 3.0, 100.0}) {
        const double bits = integrate_curve_bits([](double rho) { return 1.0 / (1.0 + rho); }, snr);
        CHECK(bits == doctest::Approx(std::log2(1.0 + snr)).epsilon(1e-10));
    }
}

TEST_CASE("achievable rate refuses curves above the bound") {
    const VseModel model(ill_conditioned_spectrum(40, 60, 10.0), 10.0);
    const auto qpsk = Constellation::qpsk();
    const auto grid = linear_grid(0.0, 10.0, 41);
    const auto bad = TransferCurve::sample([&](double rho) { return rho < 4.0 ? qpsk.mmse(rho) : 0.0; }, grid);
    try {
        achievable_rate(bad, model, qpsk);
        FAIL("expected a violation");
    } catch (const RateConstraintViolation& e) {
        CHECK(e.rho > 0.0);
        CHECK(e.rho <= 4.0);
    }
    const auto ok = TransferCurve::sample([&](double rho) { return 0.5 * rate_integrand(rho, model, qpsk); }, grid);
    CHECK(achievable_rate(ok, model, qpsk).rate_bits > 0.0);
}

TEST_CASE("Gaussian-input maximum rate equals the log-det capacity") {
    const auto gauss = Constellation::gaussian();
    int cases = 0;
    std::uint64_t seed = 1;
    for (double beta : {0.5, 1.0, 1.5}) {
        for (double kappa : {1.0, 10.0, 50.0}) {
            const std::size_t m = 40;
            const auto n = static_cast<std::size_t>(beta * m);
            std::vector<SingularSpectrum> spectra{ill_conditioned_spectrum(m, n, kappa)};
            if (kappa == 1.0) {
                spectra.push_back(gen_iid_gaussian(m, n, seed++).spectrum());
            }
            for (const auto& sp : spectra) {
                for (double snr_db : {0.0, 12.0}) {
                    const VseModel model(sp, db_to_linear(snr_db));
                    const double cap = capacity_gaussian(sp, model.snr());
                    CHECK(max_rate(model, gauss).rate_bits == doctest::Approx(cap).epsilon(0.005));
                    ++cases;
                }
            }
        }
    }
    CHECK(cases >= 20);
}

TEST_CASE("QPSK on a unitary channel saturates at 2 bits") {
    const VseModel model(flat(16), 1e4);
    CHECK(max_rate(model, Constellation::qpsk()).rate_bits == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(rate_ceiling(Constellation::qpsk()) == 2.0);
}

TEST_CASE("rate curves: monotone in SNR and ordered by modulation") {
    const auto gauss = Constellation::gaussian();
    const auto qam = Constellation::qam16();
    const auto qpsk = Constellation::qpsk();
    const std::vector<double> snr_db{0, 4, 8, 12, 16, 20, 24, 28};
    bool cas_high_order_loses = false;
    for (double kappa : {10.0, 50.0}) {
        const auto sp = ill_conditioned_spectrum(100, 150, kappa);
        const auto g = rate_table(sp, gauss, snr_db);
        const auto q16 = rate_table(sp, qam, snr_db);
        const auto q4 = rate_table(sp, qpsk, snr_db);
        for (std::size_t i = 0; i < snr_db.size(); ++i) {
            CHECK(g[i].rate_mamp >= q16[i].rate_mamp - 1e-9);
            CHECK(q16[i].rate_mamp >= q4[i].rate_mamp - 1e-9);
            for (const auto* t : {&g, &q16, &q4}) {
                CHECK((*t)[i].rate_cas <= (*t)[i].rate_mamp + 1e-9);
                if (i > 0) {
                    CHECK((*t)[i].rate_mamp >= (*t)[i - 1].rate_mamp - 1e-7);
                    if ((*t)[i - 1].rate_mamp < 1.999) {
                        CHECK((*t)[i].rate_mamp > (*t)[i - 1].rate_mamp);
                    }
                }
            }
            if (g[i].rate_cas < q4[i].rate_cas || q16[i].rate_cas < q4[i].rate_cas) {
                cas_high_order_loses = true;
            }
        }
        if (kappa == 50.0) {
            // Rate loss of the separate receiver at 12 dB.
            CHECK(q4[3].rate_mamp - q4[3].rate_cas > 1e-3);
        }
    }
    CHECK(cas_high_order_loses);
}

TEST_CASE("separate receiver on a unitary channel loses nothing") {
    const VseModel model(flat(8), db_to_linear(6.0));
    for (const auto& c : {Constellation::qpsk(), Constellation::gaussian()}) {
        const auto full = max_rate(model, c);
        const auto cas = cas_rate(model, c);
        CHECK(cas.rho_upper == doctest::Approx(model.snr()).epsilon(1e-9));
        CHECK(cas.rate_bits == doctest::Approx(full.rate_bits).epsilon(1e-9));
    }
}

TEST_CASE("rates are stable under grid refinement") {
    const VseModel model(ill_conditioned_spectrum(100, 150, 50.0), db_to_linear(15.0));
    RateOptions fine;
    fine.points_per_decade *= 2;
    for (const auto& c : {Constellation::qpsk(), Constellation::qam16()}) {
        CHECK(std::abs(max_rate(model, c).rate_bits - max_rate(model, c, fine).rate_bits) < 1e-4);
        CHECK(std::abs(cas_rate(model, c).rate_bits - cas_rate(model, c, fine).rate_bits) < 1e-4);
    }
}

TEST_CASE("SNR limit for a target rate") {
    const auto gauss = Constellation::gaussian();
    CHECK(snr_limit_for_rate(gauss, flat(8), 1.0) == doctest::Approx(0.0).epsilon(0.01));
    const auto sp = ill_conditioned_spectrum(100, 150, 10.0);
    const auto qpsk = Constellation::qpsk();
    const double a = snr_limit_for_rate(qpsk, sp, 0.8);
    const double b = snr_limit_for_rate(qpsk, sp, 1.0);
    CHECK(a < b);
    CHECK(max_rate(VseModel(sp, db_to_linear(b + 0.01)), qpsk).rate_bits >= 1.0);
    CHECK(max_rate(VseModel(sp, db_to_linear(b - 0.01)), qpsk).rate_bits < 1.0);
    CHECK_THROWS_AS(snr_limit_for_rate(qpsk, sp, 2.0), std::domain_error);
}
