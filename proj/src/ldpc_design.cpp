#include "mamp/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mamp/simplex.hpp"

namespace mamp {

namespace {

// E[2 / (1 + e^L)], L ~ N(mu, 2 mu), which equals 1 - E[tanh(L/2)].
double ga_phi_quadrature(double mu) {
    if (mu <= 0.0) {
        return 1.0;
    }
    const double s = std::sqrt(2.0 * mu);
    auto f = [&](double z) {
        const double l = mu + s * z;
        const double g = l > 0 ? 2.0 * std::exp(-l) / (1.0 + std::exp(-l)) : 2.0 / (1.0 + std::exp(l));
        return g * std::exp(-0.5 * z * z);
    };
    // The integrand peaks near L = 0, i.e. z0 = -sqrt(mu / 2).
    const double z0 = -std::sqrt(mu / 2.0);
    std::vector<double> knots{-12.0, 12.0};
    if (z0 > -40.0) {
        knots.push_back(z0);
        knots.push_back(std::max(z0 - 8.0, -40.0));
        knots.push_back(std::min(z0 + 8.0, 12.0));
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    double total = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (knots[i] > knots[i - 1]) {
            total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, knots[i - 1], knots[i], 12,
                                                                                   1e-12);
        }
    }
    return total / std::sqrt(2.0 * std::numbers::pi);
}

// log phi against log mu on a uniform grid.
struct PhiTable {
    static constexpr double lo = 1e-6;
    static constexpr double hi = 2e3;
    std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline;
    double phi_lo = 1.0;

    PhiTable() {
        const std::size_t points = 1200;
        const double a = std::log(lo);
        const double step = (std::log(hi) - a) / static_cast<double>(points - 1);
        std::vector<double> y(points);
        for (std::size_t i = 0; i < points; ++i) {
            y[i] = std::log(ga_phi_quadrature(std::exp(a + step * static_cast<double>(i))));
        }
        phi_lo = std::exp(y.front());
        spline = std::make_unique<boost::math::interpolators::cardinal_cubic_b_spline<double>>(y.begin(), y.end(), a,
                                                                                              step);
    }
};

const PhiTable& phi_table() {
    static const PhiTable table;
    return table;
}

struct BitChannel {
    double mean;
    double weight;
};

std::vector<BitChannel> bit_channels(const Constellation& c, double rho) {
    std::vector<BitChannel> out;
    for (const auto& [m, w] : ga_bit_channels(c, rho)) {
        out.push_back({m, w});
    }
    return out;
}

// Average of phi over the bit levels (each level equally likely).
double mixed_phi(const std::vector<BitChannel>& ch, double shift) {
    double s = 0.0;
    for (const auto& b : ch) {
        s += ga_phi(b.mean + shift);
    }
    return s / static_cast<double>(ch.size());
}

// APP symbol MSE when every check message has mean x.
double app_mse(const std::vector<std::pair<int, double>>& node_frac, const std::vector<BitChannel>& ch, double x) {
    double s = 0.0;
    for (const auto& [deg, frac] : node_frac) {
        for (const auto& b : ch) {
            s += frac * b.weight * ga_phi(b.mean + deg * x);
        }
    }
    return s;
}

// Smallest check-message mean x for which app_mse <= level (bisection).
double required_message_mean(const std::vector<std::pair<int, double>>& node_frac, const std::vector<BitChannel>& ch,
                             double level) {
    if (app_mse(node_frac, ch, 0.0) <= level) {
        return 0.0;
    }
    double hi = 1.0;
    while (app_mse(node_frac, ch, hi) > level) {
        hi *= 2.0;
        if (hi > 1e4) {
            return std::numeric_limits<double>::infinity();
        }
    }
    double lo = 0.0;
    for (int i = 0; i < 100 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (app_mse(node_frac, ch, mid) > level ? lo : hi) = mid;
    }
    return hi;
}

} // namespace

double ga_phi(double mu) {
    if (mu <= 0.0) {
        return 1.0;
    }
    const auto& t = phi_table();
    if (mu < PhiTable::lo) {
        return 1.0 + (t.phi_lo - 1.0) * mu / PhiTable::lo;
    }
    if (mu > PhiTable::hi) {
        return 0.0;
    }
    return std::exp((*t.spline)(std::log(mu)));
}

double ga_phi_inv(double y) {
    if (!(y > 0.0) || y > 1.0) {
        throw std::domain_error("ga_phi_inv: argument must lie in (0, 1]");
    }
    if (y == 1.0) {
        return 0.0;
    }
    if (y <= ga_phi(PhiTable::hi)) {
        return PhiTable::hi;
    }
    double lo = 0.0;
    double hi = PhiTable::hi;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
        (ga_phi(mid) > y ? lo : hi) = mid;
        if (lo == 0.0 && hi < 1e-12) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<std::pair<double, double>> ga_bit_channels(const Constellation& c, double rho) {
    // BPSK amplitude a on a real axis with noise variance 1/(2 rho): LLR mean 4 a^2 rho.
    switch (c.kind()) {
    case ConstellationKind::bpsk:
        return {{4.0 * rho, 1.0}};
    case ConstellationKind::qpsk:
        return {{2.0 * rho, 0.5}, {2.0 * rho, 0.5}};
    default:
        throw std::invalid_argument("Gaussian-approximation design supports bpsk and qpsk only");
    }
}

double ga_decoder_mmse(const DegreeDistribution& dd, const Constellation& c, double rho, int max_iters) {
    dd.validate();
    const auto ch = bit_channels(c, rho);
    double x = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        double s = 0.0;
        for (const auto& [deg, coeff] : dd.lambda) {
            s += coeff * mixed_phi(ch, (deg - 1) * x);
        }
        double next = 0.0;
        for (const auto& [deg, coeff] : dd.rho) {
            const double y = 1.0 - std::pow(1.0 - s, deg - 1);
            next += coeff * (y > 0.0 ? ga_phi_inv(std::min(y, 1.0)) : PhiTable::hi);
        }
        const bool done = std::abs(next - x) <= 1e-10 * (1.0 + x) || next >= PhiTable::hi;
        x = next;
        if (done) {
            break;
        }
    }
    return app_mse(dd.variable_node_fractions(), ch, x);
}

DegreeDistribution optimize_degree_distribution(const TransferCurve& target, const Constellation& c, int check_degree,
                                                int dv_max, double margin, const DesignOptions& opts) {
    if (!(margin > 0.0 && margin < 0.5)) {
        throw std::invalid_argument("optimize_degree_distribution: margin must lie in (0, 0.5)");
    }
    if (check_degree < 3 || dv_max < 2) {
        throw std::invalid_argument("optimize_degree_distribution: need check_degree >= 3 and dv_max >= 2");
    }
    if (!target.is_monotone(1e-12)) {
        throw std::invalid_argument("optimize_degree_distribution: target must be nonincreasing");
    }
    ga_bit_channels(c, 1.0); // rejects unsupported constellations early

    const std::size_t nvar = static_cast<std::size_t>(dv_max - 1); // lambda_2 .. lambda_dv_max
    std::vector<double> objective(nvar);
    for (std::size_t j = 0; j < nvar; ++j) {
        objective[j] = 1.0 / static_cast<double>(j + 2);
    }

    struct Requirement {
        double rho;
        double level;
        std::vector<BitChannel> ch;
    };
    std::vector<Requirement> reqs;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double rho = target.x()[i];
        if (rho <= 0.0) {
            continue;
        }
        const double demod = mmse_exact(rho, c);
        const double t = std::max(target.y()[i], opts.target_floor);
        if (t >= demod * (1.0 - 1e-9)) {
            continue; // decoding gain not required here
        }
        reqs.push_back({rho, (1.0 - margin) * t, bit_channels(c, rho)});
    }

    const double dc1 = static_cast<double>(check_degree - 1);
    auto constraints_for = [&](const Requirement& r, double x_target, std::vector<LinearConstraint>& out) {
        const double hi = x_target * 1.05;
        const double lo = std::min(1e-4, hi / 10.0);
        for (double x : log_grid(lo, hi, opts.x_points)) {
            LinearConstraint con;
            con.coeffs.resize(nvar);
            for (std::size_t j = 0; j < nvar; ++j) {
                con.coeffs[j] = mixed_phi(r.ch, static_cast<double>(j + 1) * x);
            }
            con.kind = ConstraintKind::le;
            con.rhs = 1.0 - std::pow(1.0 - ga_phi(x), 1.0 / dc1) - 1e-9;
            out.push_back(std::move(con));
        }
    };
    auto base_constraints = [&] {
        std::vector<LinearConstraint> cons;
        LinearConstraint sum{std::vector<double>(nvar, 1.0), ConstraintKind::eq, 1.0};
        cons.push_back(sum);
        if (opts.limit_degree_two) {
            LinearConstraint two{std::vector<double>(nvar, 0.0), ConstraintKind::le, 2.0 / check_degree};
            two.coeffs[0] = 1.0;
            cons.push_back(two);
        }
        return cons;
    };
    auto to_distribution = [&](const std::vector<double>& lam) {
        DegreeDistribution dd;
        double s = 0.0;
        for (std::size_t j = 0; j < nvar; ++j) {
            if (lam[j] > 1e-9) {
                s += lam[j];
            }
        }
        for (std::size_t j = 0; j < nvar; ++j) {
            if (lam[j] > 1e-9) {
                dd.lambda.emplace_back(static_cast<int>(j + 2), lam[j] / s);
            }
        }
        dd.rho = {{check_degree, 1.0}};
        return dd;
    };

    // Pass 0 assumes every variable has degree 2 when converting the MSE
    // target to a message-mean target (the worst case); later passes use the
    // node fractions of the previous solution.
    std::vector<std::pair<int, double>> node_frac{{2, 1.0}};
    DegreeDistribution best;
    bool have_best = false;
    for (int pass = 0; pass < 4; ++pass) {
        auto cons = base_constraints();
        std::vector<double> x_targets;
        for (const auto& r : reqs) {
            const double xt = required_message_mean(node_frac, r.ch, r.level);
            if (!std::isfinite(xt)) {
                std::ostringstream msg;
                msg << "target " << r.level << " at rho = " << r.rho << " is below what decoding can reach";
                throw DesignInfeasible(msg.str(), r.rho);
            }
            x_targets.push_back(xt);
            if (xt > 0.0) {
                constraints_for(r, xt, cons);
            }
        }
        const auto lp = solve_lp(objective, cons);
        if (lp.status != LpStatus::optimal) {
            if (have_best) {
                break;
            }
            // Identify a binding SINR: the first one infeasible on its own,
            // otherwise the one asking for the largest message mean.
            double binding = reqs.empty() ? 0.0 : reqs.front().rho;
            double worst = -1.0;
            bool single = false;
            for (std::size_t i = 0; i < reqs.size() && !single; ++i) {
                auto one = base_constraints();
                constraints_for(reqs[i], x_targets[i], one);
                if (x_targets[i] > 0.0 && solve_lp(objective, one).status != LpStatus::optimal) {
                    binding = reqs[i].rho;
                    single = true;
                } else if (x_targets[i] > worst) {
                    worst = x_targets[i];
                    binding = reqs[i].rho;
                }
            }
            std::ostringstream msg;
            msg << "no degree distribution with dv_max = " << dv_max << ", dc = " << check_degree
                << " meets the target; binding constraint at rho = " << binding;
            throw DesignInfeasible(msg.str(), binding);
        }
        auto dd = to_distribution(lp.x);
        bool valid = true;
        for (const auto& r : reqs) {
            if (ga_decoder_mmse(dd, c, r.rho) > r.level * (1.0 + 1e-6)) {
                valid = false;
                break;
            }
        }
        if (!valid) {
            if (!have_best) {
                best = dd; // conservative pass; keep it, later passes cannot help
                have_best = true;
            }
            break;
        }
        const bool improved = !have_best || dd.design_rate() > best.design_rate() + 1e-12;
        if (improved) {
            best = dd;
            have_best = true;
        }
        const auto next_frac = dd.variable_node_fractions();
        if (!improved || next_frac == node_frac) {
            break;
        }
        node_frac = next_frac;
    }
    best.validate();
    return best;
}

} // namespace mamp
