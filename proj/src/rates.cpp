#include "mamp/rates.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <limits>
#include <sstream>

#include "mamp/parallel.hpp"

namespace mamp {

namespace {

std::vector<double> base_nodes(double upper, const RateOptions& opts) {
    std::vector<double> nodes{0.0};
    if (upper <= opts.rho_min) {
        nodes.push_back(upper);
        return nodes;
    }
    const double decades = std::log10(upper / opts.rho_min);
    const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(decades * opts.points_per_decade)));
    for (std::size_t i = 0; i <= pieces; ++i) {
        nodes.push_back(opts.rho_min * std::pow(upper / opts.rho_min, static_cast<double>(i) / pieces));
    }
    nodes.back() = upper;
    return nodes;
}

// Gauss-Kronrod on [a, b], halved until the error estimate is below the
// absolute tolerance (integrands are O(1), so relative control on tiny
// high-SINR pieces would only chase roundoff).
double gk_piece(const std::function<double(double)>& f, double a, double b, double abs_tol, int depth) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
    if (err <= abs_tol || depth == 0) {
        return v;
    }
    const double mid = 0.5 * (a + b);
    return gk_piece(f, a, mid, 0.5 * abs_tol, depth - 1) + gk_piece(f, mid, b, 0.5 * abs_tol, depth - 1);
}

} // namespace

RateResult achievable_rate(const TransferCurve& curve_c) {
    RateResult out;
    if (curve_c.empty()) {
        throw std::invalid_argument("achievable_rate: empty curve");
    }
    out.rho_upper = curve_c.first_crossing(0.0);
    out.rate_bits = curve_c.integrate(0.0, out.rho_upper) / std::log(2.0);
    out.integrand_samples = curve_c;
    return out;
}

RateResult achievable_rate(const TransferCurve& curve_c, const VseModel& model, const Constellation& c,
                           double zero_tol) {
    for (std::size_t i = 0; i < curve_c.size(); ++i) {
        const double rho = curve_c.x()[i];
        const double y = curve_c.y()[i];
        if (rho <= 0.0 || rho > model.rho_max() || y <= zero_tol) {
            continue;
        }
        const double bound = rate_integrand(rho, model, c);
        if (y >= bound) {
            std::ostringstream msg;
            msg << "achievable_rate: code curve " << y << " reaches the bound " << bound << " at rho = " << rho;
            throw RateConstraintViolation(msg.str(), rho);
        }
    }
    return achievable_rate(curve_c);
}

double integrate_curve_bits(const std::function<double(double)>& f, double rho_upper, std::vector<double> breakpoints,
                            const RateOptions& opts) {
    if (!(rho_upper > 0.0)) {
        return 0.0;
    }
    auto nodes = base_nodes(rho_upper, opts);
    for (double b : breakpoints) {
        if (b > 0.0 && b < rho_upper) {
            nodes.push_back(b);
        }
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    double nats = 0.0;
    const double piece_tol = opts.abs_tol / static_cast<double>(nodes.size());
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        nats += gk_piece(f, nodes[i], nodes[i + 1], piece_tol, 8);
    }
    return nats / std::log(2.0);
}

double rate_integrand(double rho, const VseModel& model, const Constellation& c) {
    const double s = c.mmse(rho);
    if (rho <= 0.0) {
        return s;
    }
    return std::min(s, eta_se_inv(std::min(rho, model.rho_max()), model));
}

std::vector<double> integrand_kinks(const VseModel& model, const Constellation& c, const RateOptions& opts) {
    std::vector<double> kinks;
    const double snr = model.rho_max();
    if (!(snr > 0.0)) {
        return kinks;
    }
    auto gap = [&](double rho) { return c.mmse(rho) - eta_se_inv(rho, model); };
    auto grid = base_nodes(snr, opts);
    grid.erase(grid.begin()); // drop 0
    double prev = grid.front();
    double g_prev = gap(prev);
    const boost::math::tools::eps_tolerance<double> tol(46);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double g = gap(grid[i]);
        if ((g < 0.0) != (g_prev < 0.0)) {
            const auto r = boost::math::tools::bisect(gap, prev, grid[i], tol);
            kinks.push_back(0.5 * (r.first + r.second));
        }
        prev = grid[i];
        g_prev = g;
    }
    const double floor = model.sinr_floor();
    if (floor > 0.0 && floor < snr) {
        kinks.push_back(floor);
    }
    std::sort(kinks.begin(), kinks.end());
    return kinks;
}

namespace {

RateResult integrate_bound(const VseModel& model, const Constellation& c, double upper, const RateOptions& opts) {
    RateResult out;
    out.rho_upper = upper;
    const auto kinks = integrand_kinks(model, c, opts);
    auto f = [&](double rho) { return rate_integrand(rho, model, c); };
    out.rate_bits = integrate_curve_bits(f, upper, kinks, opts);
    auto grid = base_nodes(std::max(upper, opts.rho_min), opts);
    for (double k : kinks) {
        if (k < upper) {
            grid.push_back(k);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    out.integrand_samples = TransferCurve::sample(f, grid);
    return out;
}

} // namespace

RateResult max_rate(const VseModel& model, const Constellation& c, const RateOptions& opts) {
    return integrate_bound(model, c, model.rho_max(), opts);
}

RateResult cas_rate(const VseModel& model, const Constellation& c, const RateOptions& opts) {
    const auto fp = vse_fixed_point(model, [&](double rho) { return c.mmse(rho); });
    return integrate_bound(model, c, std::min(fp.rho_star, model.rho_max()), opts);
}

double capacity_gaussian(const SingularSpectrum& spectrum, double snr) {
    double acc = 0.0;
    for (double e : spectrum.values()) {
        acc += std::log2(1.0 + snr * e * e);
    }
    return acc / static_cast<double>(spectrum.n());
}

double rate_ceiling(const Constellation& c) {
    return c.is_discrete() ? std::log2(static_cast<double>(c.points().size()))
                           : std::numeric_limits<double>::infinity();
}

double snr_limit_for_rate(const Constellation& c, const SingularSpectrum& spectrum, double target_rate, double lo_db,
                          double hi_db) {
    if (!(target_rate > 0.0) || target_rate >= rate_ceiling(c)) {
        throw std::domain_error("snr_limit_for_rate: target must lie in (0, log2 |C|)");
    }
    auto rate_at = [&](double db) { return max_rate(VseModel(spectrum, db_to_linear(db)), c).rate_bits; };
    if (rate_at(hi_db) < target_rate) {
        throw std::domain_error("snr_limit_for_rate: target not reached by " + std::to_string(hi_db) + " dB");
    }
    if (rate_at(lo_db) >= target_rate) {
        return lo_db;
    }
    while (hi_db - lo_db > 0.005) {
        const double mid = 0.5 * (lo_db + hi_db);
        (rate_at(mid) < target_rate ? lo_db : hi_db) = mid;
    }
    return 0.5 * (lo_db + hi_db);
}

std::vector<RateRow> rate_table(const SingularSpectrum& spectrum, const Constellation& c,
                                const std::vector<double>& snr_db, unsigned workers, const RateOptions& opts) {
    std::vector<RateRow> rows(snr_db.size());
    c.mmse(1.0); // build the table before the workers start
    parallel_for(snr_db.size(), workers, [&](std::size_t i) {
        const double snr = db_to_linear(snr_db[i]);
        const VseModel model(spectrum, snr);
        rows[i] = {snr_db[i], max_rate(model, c, opts).rate_bits, cas_rate(model, c, opts).rate_bits,
                   capacity_gaussian(spectrum, snr)};
    });
    return rows;
}

} // namespace mamp
