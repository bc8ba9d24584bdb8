#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "mamp/modem.hpp"
#include "mamp/rng.hpp"

using namespace mamp;

namespace {

// Brute-force posterior over the listed points for r = x + CN(0, v).
cplx brute_mean(const std::vector<cplx>& pts, cplx r, double v) {
    double z = 0.0;
    cplx m = 0.0;
    for (const auto& p : pts) {
        const double w = std::exp(-std::norm(r - p) / v);
        z += w;
        m += w * p;
    }
    return m / z;
}

struct McEstimate {
    double mean;
    double stderr_;
};

McEstimate monte_carlo_mmse(const Constellation& c, double rho, std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    ComplexNormal noise(1.0);
    std::uniform_int_distribution<std::size_t> pick(0, c.points().size() - 1);
    const double s = std::sqrt(rho);
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const cplx x = c.points()[pick(rng)];
        cplx z = noise(rng);
        if (c.kind() == ConstellationKind::bpsk) {
            z = cplx(z.real(), 0.0);
        }
        const double e = std::norm(posterior(s * x + z, rho, c).mean - x);
        sum += e;
        sum2 += e * e;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    return {mean, std::sqrt((sum2 / n - mean * mean) / n)};
}

} // namespace

TEST_CASE("gray maps") {
    const std::vector<std::uint8_t> q{0, 0};
    const auto s = modulate(q, Constellation::qpsk());
    CHECK(s[0].real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(s[0].imag() == doctest::Approx(1 / std::sqrt(2.0)));
    const std::vector<std::uint8_t> b{0, 1};
    const auto sb = modulate(b, Constellation::bpsk());
    CHECK(sb[0] == cplx(1, 0));
    CHECK(sb[1] == cplx(-1, 0));
    const std::vector<std::uint8_t> odd{0, 1, 1};
    CHECK_THROWS_AS(modulate(odd, Constellation::qpsk()), std::domain_error);
}

TEST_CASE("16-QAM: distinct points, unit power, Gray neighbours") {
    const auto c = Constellation::qam16();
    std::vector<std::uint8_t> bits;
    for (int label = 0; label < 16; ++label) {
        for (int j = 3; j >= 0; --j) {
            bits.push_back(static_cast<std::uint8_t>((label >> j) & 1));
        }
    }
    const auto s = modulate(bits, c);
    std::set<std::pair<double, double>> seen;
    double power = 0.0;
    for (const auto& p : s) {
        seen.insert({p.real(), p.imag()});
        power += std::norm(p);
    }
    CHECK(seen.size() == 16);
    CHECK(power / 16 == doctest::Approx(1.0).epsilon(1e-12));
    // Nearest neighbours differ in exactly one bit.
    const double dmin = 2 / std::sqrt(10.0);
    for (int a = 0; a < 16; ++a) {
        for (int b = 0; b < a; ++b) {
            if (std::abs(std::abs(s[a] - s[b]) - dmin) < 1e-12) {
                CHECK(std::popcount(static_cast<unsigned>(a ^ b)) == 1);
            }
        }
    }
}

TEST_CASE("posterior special cases") {
    for (const auto& c : {Constellation::bpsk(), Constellation::qpsk(), Constellation::qam16()}) {
        const auto p = posterior(cplx(0.3, -1.2), 0.0, c);
        CHECK(std::abs(p.mean) < 1e-15);
        CHECK(p.var == doctest::Approx(1.0));
    }
    const auto g = posterior(cplx(0.7, 0.1), 3.0, Constellation::gaussian());
    CHECK(g.var == doctest::Approx(0.25));
    CHECK(g.mean.real() == doctest::Approx(std::sqrt(3.0) * 0.7 / 4));
}

TEST_CASE("BPSK posterior mean is tanh(2 sqrt(rho) r)") {
    const auto c = Constellation::bpsk();
    for (double r : {-1.3, -0.2, 0.0, 0.4, 2.5}) {
        for (double rho : {0.1, 1.0, 7.0}) {
            const auto p = posterior(cplx(r, 0.4), rho, c);
            // Brute force two-point posterior, real axis noise variance 1/2.
            const double wp = std::exp(-std::pow(r - std::sqrt(rho), 2));
            const double wm = std::exp(-std::pow(r + std::sqrt(rho), 2));
            CHECK(p.mean.real() == doctest::Approx((wp - wm) / (wp + wm)).epsilon(1e-12));
            CHECK(p.mean.real() == doctest::Approx(std::tanh(2 * std::sqrt(rho) * r)).epsilon(1e-12));
            CHECK(p.mean.imag() == 0.0);
        }
    }
}

TEST_CASE("denoise matches brute-force posterior") {
    Rng rng(5);
    ComplexNormal cn(1.0);
    for (const auto& c : {Constellation::qpsk(), Constellation::qam16(),
                          Constellation::custom({{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {2, 2}, {-2, 2}, {2, -2}, {-2, -2}})}) {
        std::vector<cplx> r(50);
        for (auto& x : r) {
            x = cn(rng);
        }
        std::vector<cplx> m(r.size());
        denoise(r, 0.3, c, m);
        for (std::size_t i = 0; i < r.size(); ++i) {
            CHECK(std::abs(m[i] - brute_mean(c.points(), r[i], 0.3)) < 1e-12);
        }
    }
}

TEST_CASE("demapper LLRs match brute-force bit marginals") {
    Rng rng(9);
    ComplexNormal cn(1.0);
    for (const auto& c : {Constellation::bpsk(), Constellation::qpsk(), Constellation::qam16()}) {
        const auto b = static_cast<std::size_t>(c.bits_per_symbol());
        std::vector<cplx> r(20);
        for (auto& x : r) {
            x = cn(rng);
        }
        std::vector<double> llr(r.size() * b);
        const double v = 0.4;
        demap_llr(r, v, c, llr);
        for (std::size_t s = 0; s < r.size(); ++s) {
            for (std::size_t j = 0; j < b; ++j) {
                double p0 = 0.0;
                double p1 = 0.0;
                for (std::size_t label = 0; label < c.points().size(); ++label) {
                    const double w = std::exp(-std::norm(r[s] - c.points()[label]) / v);
                    (((label >> (b - 1 - j)) & 1U) ? p1 : p0) += w;
                }
                CHECK(llr[s * b + j] == doctest::Approx(std::log(p0 / p1)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("soft symbols from QPSK LLRs reproduce the posterior") {
    const auto c = Constellation::qpsk();
    std::vector<cplx> r{{0.3, -0.8}, {1.5, 0.2}, {-0.1, 0.0}};
    std::vector<double> llr(6);
    demap_llr(r, 0.5, c, llr);
    std::vector<cplx> m(3);
    std::vector<cplx> ref(3);
    const double v_soft = soft_symbols(llr, c, m);
    const double v_post = denoise(r, 0.5, c, ref);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(m[i] - ref[i]) < 1e-12);
    }
    CHECK(v_soft == doctest::Approx(v_post).epsilon(1e-12));
    std::vector<double> sure{40, -40, 0, 0};
    std::vector<cplx> m2(2);
    soft_symbols(sure, c, m2);
    CHECK(std::abs(m2[0] - c.points()[1]) < 1e-12);
    CHECK(std::abs(m2[1]) < 1e-15);
}

TEST_CASE("mmse curves: closed form, endpoints, monotone") {
    const auto grid = default_rho_grid(100.0, 60);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == doctest::Approx(100.0));
    const auto gauss = mmse_curve(Constellation::gaussian(), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(gauss.y()[i] == 1.0 / (1.0 + grid[i]));
    }
    for (const auto& c : {Constellation::bpsk(), Constellation::qpsk(), Constellation::qam16()}) {
        const auto curve = mmse_curve(c, grid);
        CHECK(curve.y().front() == 1.0);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            CHECK(curve.y()[i] < curve.y()[i - 1]);
            CHECK(curve.y()[i] > 0.0);
        }
    }
}

TEST_CASE("quadrature order doubling changes mmse by < 1e-8") {
    for (const auto& c : {Constellation::bpsk(), Constellation::qpsk(), Constellation::qam16()}) {
        for (double rho : default_rho_grid(1e4, 40)) {
            CHECK(std::abs(mmse_exact(rho, c, 31) - mmse_exact(rho, c, 61)) < 1e-8);
        }
    }
}

TEST_CASE("BPSK and QPSK mmse agree with Monte Carlo at rho = 1") {
    for (const auto& c : {Constellation::bpsk(), Constellation::qpsk()}) {
        const auto mc = monte_carlo_mmse(c, 1.0, 1000000, 77);
        CHECK(std::abs(mc.mean - mmse_exact(1.0, c)) < 3 * mc.stderr_);
    }
}

TEST_CASE("empirical MSE of the posterior mean matches the curve for 16-QAM") {
    const auto c = Constellation::qam16();
    const auto mc = monte_carlo_mmse(c, 10.0, 100000, 78);
    CHECK(std::abs(mc.mean - mmse_exact(10.0, c)) < 3 * mc.stderr_);
}

TEST_CASE("I-MMSE: integrated mmse reproduces the entropy-quadrature mutual information") {
    for (const auto& c : {Constellation::qpsk(), Constellation::qam16()}) {
        for (double rho : {0.5, 4.0, 30.0}) {
            const auto g = linear_grid(0.0, rho, 4001);
            const auto curve = mmse_curve(c, g);
            // Simpson's rule on the uniform grid.
            double s = curve.y().front() + curve.y().back();
            for (std::size_t i = 1; i + 1 < g.size(); ++i) {
                s += (i % 2 ? 4.0 : 2.0) * curve.y()[i];
            }
            const double nats = s * (g[1] - g[0]) / 3.0;
            CHECK(nats / std::log(2.0) == doctest::Approx(mutual_information_bits(rho, c)).epsilon(1e-7));
        }
    }
    CHECK(mutual_information_bits(1.0, Constellation::gaussian()) == 1.0);
    CHECK(mutual_information_bits(1e4, Constellation::qpsk()) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("cached mmse table tracks the exact quadrature") {
    for (const auto& c : {Constellation::qpsk(), Constellation::qam16()}) {
        for (double rho : {1e-7, 3e-3, 0.37, 2.9, 41.0, 333.0}) {
            const double exact = mmse_exact(rho, c);
            CHECK(std::abs(c.mmse(rho) - exact) <= 1e-6 * exact + 1e-14);
        }
    }
}

TEST_CASE("custom constellations") {
    const auto c = Constellation::custom({{3, 0}, {-3, 0}});
    CHECK(std::abs(c.points()[0] - cplx(1, 0)) < 1e-15);
    CHECK(mmse_exact(1.0, c) == doctest::Approx(mmse_exact(1.0, Constellation::bpsk())).epsilon(1e-7));
    CHECK_THROWS(Constellation::custom({{1, 0}, {1, 0}}));
    CHECK_THROWS(Constellation::custom({{1, 0}, {0, 1}, {-1, 0}}));
    CHECK_THROWS(Constellation::by_name("8psk"));
}
