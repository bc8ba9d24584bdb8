#include "mamp/se.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative tolerance of roughly 1e-14 on the bracket.
const boost::math::tools::eps_tolerance<double> kTight(46);

// Solve f(u) = 0 for increasing f with f(lo) < 0 < f(hi) by bisection.
template <class F>
double bisect_root(F f, double lo, double hi) {
    const auto r = boost::math::tools::bisect(f, lo, hi, kTight);
    return 0.5 * (r.first + r.second);
}

} // namespace

VseModel::VseModel(SingularSpectrum spectrum, double snr) : spectrum_(std::move(spectrum)), snr_(snr) {
    if (!(snr >= 0.0) || !std::isfinite(snr)) {
        throw std::invalid_argument("VseModel: snr must be finite and >= 0");
    }
    const double n = static_cast<double>(spectrum_.n());
    unobserved_ = n;
    for (double e : spectrum_.values()) {
        const double s = snr * e * e;
        if (s > 0.0) {
            s_.push_back(s);
            unobserved_ -= 1.0;
        }
    }
    double inv_sum = 0.0;
    double sum = 0.0;
    for (double s : s_) {
        inv_sum += 1.0 / s;
        sum += s;
    }
    rho_ceiling_ = sum / n;
    if (unobserved_ > 0.0) {
        v_limit_ = kInf;
        rho_floor_ = 0.0;
    } else {
        v_limit_ = inv_sum / n;
        rho_floor_ = static_cast<double>(s_.size()) / inv_sum;
    }
}

double VseModel::gamma_hat(double u) const {
    double acc = unobserved_ * u;
    for (double s : s_) {
        acc += u / (1.0 + s * u);
    }
    return acc / static_cast<double>(spectrum_.n());
}

double VseModel::extrinsic_sinr(double u) const {
    double num = 0.0;
    double den = unobserved_;
    for (double s : s_) {
        const double w = 1.0 / (1.0 + s * u);
        num += s * w;
        den += w;
    }
    return num / den;
}

double gamma_hat_se(double v, const VseModel& model) {
    if (!(v > 0.0)) {
        throw std::domain_error("gamma_hat_se: prior variance must be > 0");
    }
    return model.gamma_hat(v);
}

double gamma_hat_se_inv(double vhat, const VseModel& model) {
    if (!(vhat > 0.0) || !(vhat < model.gamma_hat_limit())) {
        std::ostringstream msg;
        msg << "gamma_hat_se_inv: " << vhat << " outside the attainable range (0, " << model.gamma_hat_limit() << ")";
        throw std::domain_error(msg.str());
    }
    if (model.snr() == 0.0) {
        return vhat;
    }
    // gamma_hat(u) <= u, so the root lies above vhat.
    double hi = 2.0 * vhat;
    while (model.gamma_hat(hi) < vhat) {
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            throw std::domain_error("gamma_hat_se_inv: no bracket");
        }
    }
    return bisect_root([&](double u) { return model.gamma_hat(u) - vhat; }, vhat, hi);
}

double eta_se(double v, const VseModel& model) {
    if (v == 0.0) {
        return model.sinr_ceiling();
    }
    return model.extrinsic_sinr(gamma_hat_se_inv(v, model));
}

double eta_se_extended(double v, const VseModel& model) {
    if (v >= model.gamma_hat_limit()) {
        return 1.0 / v;
    }
    return eta_se(v, model);
}

double eta_se_inv(double rho, const VseModel& model) {
    if (!(rho > 0.0) || rho > model.rho_max() * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "eta_se_inv: rho = " << rho << " outside (0, " << model.rho_max() << "]";
        throw std::domain_error(msg.str());
    }
    if (rho >= model.sinr_ceiling()) {
        return 0.0;
    }
    if (rho <= model.sinr_floor()) {
        return 1.0 / rho;
    }
    // extrinsic_sinr decreases from the ceiling (u = 0) towards the floor.
    double hi = 1.0;
    while (model.extrinsic_sinr(hi) > rho) {
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            return 1.0 / rho;
        }
    }
    const double u = bisect_root([&](double x) { return rho - model.extrinsic_sinr(x); }, 0.0, hi);
    return model.gamma_hat(u);
}

VseTrajectory vse_trajectory(const VseModel& model, const std::function<double(double)>& phi, int max_iters) {
    VseTrajectory out;
    double rho = model.extrinsic_sinr(1.0);
    double v_prev = kInf;
    for (int t = 0; t < max_iters; ++t) {
        const double v = phi(rho);
        out.steps.push_back({rho, v});
        out.limit = {rho, v};
        if (std::abs(v - v_prev) < 1e-12) {
            out.converged = true;
            break;
        }
        v_prev = v;
        rho = eta_se_extended(v, model);
    }
    return out;
}

VseTrajectory vse_trajectory(const VseModel& model, const TransferCurve& denoiser_curve, int max_iters) {
    return vse_trajectory(model, [&](double rho) { return denoiser_curve(rho); }, max_iters);
}

FixedPoint vse_fixed_point(const VseModel& model, const std::function<double(double)>& phi) {
    const double rho_max = model.rho_max();
    const double rho_1 = std::min(model.extrinsic_sinr(1.0), rho_max);
    auto gap = [&](double rho) { return phi(rho) - eta_se_inv(rho, model); };
    constexpr int kScan = 400;
    if (rho_1 <= 0.0) {
        return {0.0, phi(0.0)};
    }
    double prev = rho_1;
    double g_prev = gap(prev);
    if (g_prev == 0.0) {
        return {prev, phi(prev)};
    }
    const bool upward = g_prev < 0.0;
    // Geometric scan towards rho_max (or towards zero when starting above the curve).
    const double end = upward ? rho_max : rho_1 * 1e-9;
    const double ratio = std::pow(end / rho_1, 1.0 / kScan);
    for (int i = 1; i <= kScan; ++i) {
        const double rho = i == kScan ? end : rho_1 * std::pow(ratio, i);
        const double g = gap(rho);
        if ((g >= 0.0) == upward || g == 0.0) {
            const double lo = std::min(prev, rho);
            const double hi = std::max(prev, rho);
            const auto r = boost::math::tools::bisect(gap, lo, hi, kTight);
            const double star = 0.5 * (r.first + r.second);
            return {star, phi(star)};
        }
        prev = rho;
    }
    return {end, phi(end)};
}

TransferCurve gamma_hat_curve(const VseModel& model, const std::vector<double>& v_grid) {
    std::vector<double> y;
    y.reserve(v_grid.size());
    for (double v : v_grid) {
        y.push_back(gamma_hat_se(v, model));
    }
    return TransferCurve(v_grid, std::move(y), Monotonicity::nondecreasing);
}

TransferCurve eta_inv_curve(const VseModel& model, const std::vector<double>& rho_grid) {
    std::vector<double> y;
    y.reserve(rho_grid.size());
    for (double rho : rho_grid) {
        y.push_back(eta_se_inv(rho, model));
    }
    return TransferCurve(rho_grid, std::move(y), Monotonicity::nonincreasing);
}

} // namespace mamp
