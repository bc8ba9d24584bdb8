#include "mamp/modem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mamp {

namespace {

// Noise is negligible beyond |z| = 9 per real axis (weight exp(-81)).
constexpr double kAxisSpan = 9.0;
constexpr double kQuadTol = 1e-13;
// exp(-z^2) underflows past this.
constexpr double kUnderflowSpan = 26.0;

template <int P, class F>
double kronrod(F&& f, double a, double b, double tol = kQuadTol) {
    return boost::math::quadrature::gauss_kronrod<double, P>::integrate(f, a, b, 15, tol);
}

template <class F>
double kronrod_any(int points, F&& f, double a, double b, double tol = kQuadTol) {
    switch (points) {
    case 15:
        return kronrod<15>(f, a, b, tol);
    case 31:
        return kronrod<31>(f, a, b, tol);
    case 61:
        return kronrod<61>(f, a, b, tol);
    default:
        throw std::invalid_argument("mmse_exact: kronrod_points must be 15, 31 or 61");
    }
}

double log_sum_exp(const double* v, std::size_t n) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        mx = std::max(mx, v[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += std::exp(v[i] - mx);
    }
    return mx + std::log(s);
}

// Posterior mean / second moment on one PAM axis; `scale` multiplies the
// levels in the likelihood and `inv_2var` = 1 / (2 sigma^2) of the axis noise.
struct AxisMoments {
    double mean;
    double second;
};

AxisMoments axis_posterior(const PamAxis& axis, double obs, double scale, double inv_2var) {
    const std::size_t k = axis.levels.size();
    if (k == 1) {
        return {axis.levels[0], axis.levels[0] * axis.levels[0]};
    }
    double logw[16];
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        const double d = obs - scale * axis.levels[i];
        logw[i] = -d * d * inv_2var;
        mx = std::max(mx, logw[i]);
    }
    double z = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double w = std::exp(logw[i] - mx);
        z += w;
        m1 += w * axis.levels[i];
        m2 += w * axis.levels[i] * axis.levels[i];
    }
    return {m1 / z, m2 / z};
}

PamAxis pam_axis(std::vector<double> gray_levels, std::vector<int> bits) {
    return PamAxis{std::move(gray_levels), std::move(bits)};
}

int axis_label(const PamAxis& axis, int symbol_label, int bits_per_symbol) {
    int label = 0;
    for (int pos : axis.bit_positions) {
        label = (label << 1) | ((symbol_label >> (bits_per_symbol - 1 - pos)) & 1);
    }
    return label;
}

double axis_mmse(const PamAxis& axis, double rho, int points) {
    const std::size_t k = axis.levels.size();
    if (k == 1) {
        return 0.0;
    }
    const double s = std::sqrt(rho);
    std::vector<double> sorted = axis.levels;
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double a = axis.levels[j];
        // Posterior-mean error sum_i w_i (a_i - a) / sum_i w_i, formed without
        // cancellation so tiny tails stay accurate.
        auto f = [&](double z) {
            double logw[16];
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < k; ++i) {
                const double d = z + s * (a - axis.levels[i]);
                logw[i] = -d * d;
                mx = std::max(mx, logw[i]);
            }
            double norm = 0.0;
            double err = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const double w = std::exp(logw[i] - mx);
                norm += w;
                err += w * (axis.levels[i] - a);
            }
            err /= norm;
            return err * err * std::exp(-z * z);
        };
        // At high SINR the error mass sits near the decision boundaries, far
        // from z = 0; split the range there so the quadrature sees it.
        std::vector<double> knots{-kAxisSpan, 0.0, kAxisSpan};
        for (std::size_t i = 1; i < k; ++i) {
            const double zb = s * (0.5 * (sorted[i - 1] + sorted[i]) - a);
            if (std::abs(zb) > 0.5 * kAxisSpan && std::abs(zb) < kUnderflowSpan) {
                knots.push_back(zb);
                knots.push_back(std::clamp(zb - kAxisSpan, -kUnderflowSpan, kUnderflowSpan));
                knots.push_back(std::clamp(zb + kAxisSpan, -kUnderflowSpan, kUnderflowSpan));
            }
        }
        std::sort(knots.begin(), knots.end());
        knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
        for (std::size_t i = 1; i < knots.size(); ++i) {
            total += kronrod_any(points, f, knots[i - 1], knots[i]);
        }
    }
    return total / (static_cast<double>(k) * std::sqrt(std::numbers::pi));
}

cplx general_posterior_mean(const std::vector<cplx>& pts, cplx r, double scale, double inv_var, double* second) {
    double logw[256];
    const std::size_t k = pts.size();
    for (std::size_t i = 0; i < k; ++i) {
        logw[i] = -std::norm(r - scale * pts[i]) * inv_var;
    }
    const double mx = *std::max_element(logw, logw + k);
    double z = 0.0;
    cplx m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double w = std::exp(logw[i] - mx);
        z += w;
        m1 += w * pts[i];
        m2 += w * std::norm(pts[i]);
    }
    if (second) {
        *second = m2 / z;
    }
    return m1 / z;
}

double general_mmse(const std::vector<cplx>& pts, double rho, int points) {
    const double s = std::sqrt(rho);
    double total = 0.0;
    for (const cplx& xj : pts) {
        auto outer = [&](double zr) {
            auto inner = [&](double zi) {
                const cplx r = s * xj + cplx(zr, zi);
                const cplx m = general_posterior_mean(pts, r, s, 1.0, nullptr);
                return std::norm(m - xj) * std::exp(-zr * zr - zi * zi);
            };
            return kronrod_any(points, inner, -kAxisSpan, kAxisSpan, 1e-11);
        };
        total += kronrod_any(points, outer, -kAxisSpan, kAxisSpan, 1e-11);
    }
    return total / (static_cast<double>(pts.size()) * std::numbers::pi);
}

double axis_information_bits(const PamAxis& axis, double rho) {
    const std::size_t k = axis.levels.size();
    if (k == 1) {
        return 0.0;
    }
    const double s = std::sqrt(rho);
    double expected = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        auto f = [&](double z) {
            double terms[16];
            for (std::size_t i = 0; i < k; ++i) {
                const double d = s * (axis.levels[j] - axis.levels[i]) + z;
                terms[i] = -d * d + z * z;
            }
            return log_sum_exp(terms, k) * std::exp(-z * z);
        };
        expected += kronrod<31>(f, -kAxisSpan, kAxisSpan);
    }
    expected /= static_cast<double>(k) * std::sqrt(std::numbers::pi);
    return std::log2(static_cast<double>(k)) - expected / std::numbers::ln2;
}

double general_information_bits(const std::vector<cplx>& pts, double rho) {
    const double s = std::sqrt(rho);
    const std::size_t k = pts.size();
    double expected = 0.0;
    for (const cplx& xj : pts) {
        auto outer = [&](double zr) {
            auto inner = [&](double zi) {
                const cplx z(zr, zi);
                double terms[256];
                for (std::size_t i = 0; i < k; ++i) {
                    terms[i] = -std::norm(s * (xj - pts[i]) + z) + std::norm(z);
                }
                return log_sum_exp(terms, k) * std::exp(-std::norm(z));
            };
            return kronrod<31>(inner, -kAxisSpan, kAxisSpan, 1e-11);
        };
        expected += kronrod<31>(outer, -kAxisSpan, kAxisSpan, 1e-11);
    }
    expected /= static_cast<double>(k) * std::numbers::pi;
    return std::log2(static_cast<double>(k)) - expected / std::numbers::ln2;
}

} // namespace

// Cubic B-spline of log(mmse) against log(rho) on a uniform grid.
struct Constellation::MmseTable {
    std::once_flag once;
    std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline;
    double rho_lo = 0.0;
    double rho_hi = 0.0;
    double mmse_lo = 1.0;

    void build(const Constellation& c) {
        constexpr double lo = 1e-6;
        constexpr std::size_t per_decade = 60;
        const double step = std::log(10.0) / per_decade;
        std::vector<double> log_mmse;
        for (std::size_t i = 0; i <= 12 * per_decade; ++i) {
            const double v = mmse_exact(lo * std::exp(step * static_cast<double>(i)), c);
            if (!(v > 1e-280)) {
                break;
            }
            log_mmse.push_back(std::log(v));
        }
        rho_lo = lo;
        rho_hi = lo * std::exp(step * static_cast<double>(log_mmse.size() - 1));
        mmse_lo = std::exp(log_mmse.front());
        spline = std::make_unique<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
            log_mmse.begin(), log_mmse.end(), std::log(lo), step);
    }

    double eval(double rho) const {
        if (rho <= rho_lo) {
            // mmse(rho) = 1 - rho + O(rho^2) for unit power.
            return 1.0 + (mmse_lo - 1.0) * rho / rho_lo;
        }
        if (rho >= rho_hi) {
            return 0.0;
        }
        return std::exp((*spline)(std::log(rho)));
    }
};

Constellation Constellation::bpsk() {
    Constellation c;
    c.kind_ = ConstellationKind::bpsk;
    c.name_ = "bpsk";
    c.bits_per_symbol_ = 1;
    c.points_ = {cplx(1.0, 0.0), cplx(-1.0, 0.0)};
    c.axes_[0] = pam_axis({1.0, -1.0}, {0});
    c.axes_[1] = pam_axis({0.0}, {});
    c.separable_ = true;
    c.table_ = std::make_shared<MmseTable>();
    return c;
}

Constellation Constellation::qpsk() {
    Constellation c;
    c.kind_ = ConstellationKind::qpsk;
    c.name_ = "qpsk";
    c.bits_per_symbol_ = 2;
    const double a = 1.0 / std::numbers::sqrt2;
    c.axes_[0] = pam_axis({a, -a}, {0});
    c.axes_[1] = pam_axis({a, -a}, {1});
    c.separable_ = true;
    for (int label = 0; label < 4; ++label) {
        c.points_.emplace_back(c.axes_[0].levels[axis_label(c.axes_[0], label, 2)],
                               c.axes_[1].levels[axis_label(c.axes_[1], label, 2)]);
    }
    c.table_ = std::make_shared<MmseTable>();
    return c;
}

Constellation Constellation::qam16() {
    Constellation c;
    c.kind_ = ConstellationKind::qam16;
    c.name_ = "qam16";
    c.bits_per_symbol_ = 4;
    const double s = 1.0 / std::sqrt(10.0);
    // Gray PAM-4 indexed by axis label: 00 -> +3, 01 -> +1, 10 -> -3, 11 -> -1.
    const std::vector<double> pam4{3 * s, 1 * s, -3 * s, -1 * s};
    c.axes_[0] = pam_axis(pam4, {0, 1});
    c.axes_[1] = pam_axis(pam4, {2, 3});
    c.separable_ = true;
    for (int label = 0; label < 16; ++label) {
        c.points_.emplace_back(c.axes_[0].levels[axis_label(c.axes_[0], label, 4)],
                               c.axes_[1].levels[axis_label(c.axes_[1], label, 4)]);
    }
    c.table_ = std::make_shared<MmseTable>();
    return c;
}

Constellation Constellation::gaussian() {
    Constellation c;
    c.kind_ = ConstellationKind::gaussian;
    c.name_ = "gaussian";
    return c;
}

Constellation Constellation::custom(std::vector<cplx> points, std::string name) {
    const std::size_t k = points.size();
    if (k < 2 || k > 256 || (k & (k - 1)) != 0) {
        throw std::invalid_argument("Constellation::custom: size must be a power of two in [2, 256]");
    }
    double power = 0.0;
    for (const auto& p : points) {
        power += std::norm(p);
    }
    power /= static_cast<double>(k);
    if (!(power > 0.0)) {
        throw std::invalid_argument("Constellation::custom: zero-power point set");
    }
    const double scale = 1.0 / std::sqrt(power);
    for (auto& p : points) {
        p *= scale;
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(points[i] - points[j]) < 1e-12) {
                throw std::invalid_argument("Constellation::custom: points must be distinct");
            }
        }
    }
    Constellation c;
    c.kind_ = ConstellationKind::custom;
    c.name_ = std::move(name);
    c.points_ = std::move(points);
    c.bits_per_symbol_ = static_cast<int>(std::lround(std::log2(static_cast<double>(k))));
    c.separable_ = false;
    c.unit_power_ = true;
    c.table_ = std::make_shared<MmseTable>();
    return c;
}

Constellation Constellation::by_name(const std::string& name) {
    if (name == "bpsk") {
        return bpsk();
    }
    if (name == "qpsk") {
        return qpsk();
    }
    if (name == "qam16" || name == "16qam") {
        return qam16();
    }
    if (name == "gaussian") {
        return gaussian();
    }
    throw std::invalid_argument("unknown constellation '" + name + "' (bpsk, qpsk, qam16, gaussian)");
}

Constellation Constellation::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("Constellation::load: cannot open " + path);
    }
    std::vector<cplx> pts;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        double re = 0.0;
        double im = 0.0;
        if (!(ls >> re >> im)) {
            throw std::runtime_error("Constellation::load: malformed line '" + line + "'");
        }
        pts.emplace_back(re, im);
    }
    return custom(std::move(pts), path);
}

double Constellation::mmse(double rho) const {
    if (kind_ == ConstellationKind::gaussian) {
        return 1.0 / (1.0 + rho);
    }
    if (rho <= 0.0) {
        return 1.0;
    }
    std::call_once(table_->once, [this] { table_->build(*this); });
    return table_->eval(rho);
}

std::vector<cplx> modulate(std::span<const std::uint8_t> bits, const Constellation& c) {
    if (!c.is_discrete()) {
        throw std::domain_error("modulate: the Gaussian input has no bit mapping");
    }
    const auto b = static_cast<std::size_t>(c.bits_per_symbol());
    if (bits.size() % b != 0) {
        throw std::domain_error("modulate: bit count is not a multiple of bits per symbol");
    }
    std::vector<cplx> out(bits.size() / b);
    for (std::size_t s = 0; s < out.size(); ++s) {
        int label = 0;
        for (std::size_t i = 0; i < b; ++i) {
            label = (label << 1) | (bits[s * b + i] & 1);
        }
        out[s] = c.points()[static_cast<std::size_t>(label)];
    }
    return out;
}

ScalarPosterior posterior(cplx r, double rho, const Constellation& c) {
    if (rho < 0.0) {
        throw std::domain_error("posterior: rho must be >= 0");
    }
    if (c.kind() == ConstellationKind::gaussian) {
        return {std::sqrt(rho) * r / (1.0 + rho), 1.0 / (1.0 + rho)};
    }
    const double s = std::sqrt(rho);
    if (c.is_separable()) {
        const auto re = axis_posterior(c.axis_re(), r.real(), s, 1.0);
        const auto im = axis_posterior(c.axis_im(), r.imag(), s, 1.0);
        const double var = (re.second - re.mean * re.mean) + (im.second - im.mean * im.mean);
        return {cplx(re.mean, im.mean), std::max(var, 0.0)};
    }
    double second = 0.0;
    const cplx m = general_posterior_mean(c.points(), r, s, 1.0, &second);
    return {m, std::max(second - std::norm(m), 0.0)};
}

double denoise(std::span<const cplx> r, double v, const Constellation& c, std::span<cplx> mean) {
    if (!(v > 0.0)) {
        throw std::domain_error("denoise: noise variance must be positive");
    }
    if (mean.size() != r.size()) {
        throw std::invalid_argument("denoise: output size mismatch");
    }
    double var_sum = 0.0;
    if (c.kind() == ConstellationKind::gaussian) {
        const double g = 1.0 / (1.0 + v);
        for (std::size_t i = 0; i < r.size(); ++i) {
            mean[i] = g * r[i];
        }
        return v / (1.0 + v);
    }
    if (c.is_separable()) {
        const double inv_2var = 1.0 / v; // per-axis variance v/2
        for (std::size_t i = 0; i < r.size(); ++i) {
            const auto re = axis_posterior(c.axis_re(), r[i].real(), 1.0, inv_2var);
            const auto im = axis_posterior(c.axis_im(), r[i].imag(), 1.0, inv_2var);
            mean[i] = cplx(re.mean, im.mean);
            var_sum += (re.second - re.mean * re.mean) + (im.second - im.mean * im.mean);
        }
    } else {
        for (std::size_t i = 0; i < r.size(); ++i) {
            double second = 0.0;
            mean[i] = general_posterior_mean(c.points(), r[i], 1.0, 1.0 / v, &second);
            var_sum += second - std::norm(mean[i]);
        }
    }
    return std::max(var_sum, 0.0) / static_cast<double>(r.size());
}

void demap_llr(std::span<const cplx> r, double v, const Constellation& c, std::span<double> llr) {
    if (!c.is_discrete()) {
        throw std::domain_error("demap_llr: the Gaussian input has no bit labels");
    }
    const int b = c.bits_per_symbol();
    if (llr.size() != r.size() * static_cast<std::size_t>(b)) {
        throw std::invalid_argument("demap_llr: output size mismatch");
    }
    const double inv_var = 1.0 / v;
    if (c.is_separable()) {
        for (std::size_t s = 0; s < r.size(); ++s) {
            for (int ax = 0; ax < 2; ++ax) {
                const PamAxis& axis = ax == 0 ? c.axis_re() : c.axis_im();
                const double obs = ax == 0 ? r[s].real() : r[s].imag();
                const int nb = static_cast<int>(axis.bit_positions.size());
                if (nb == 0) {
                    continue;
                }
                const std::size_t k = axis.levels.size();
                double metric[16];
                for (std::size_t i = 0; i < k; ++i) {
                    const double d = obs - axis.levels[i];
                    metric[i] = -d * d * inv_var;
                }
                for (int j = 0; j < nb; ++j) {
                    double zero[16];
                    double one[16];
                    std::size_t nz = 0;
                    std::size_t no = 0;
                    for (std::size_t i = 0; i < k; ++i) {
                        if ((i >> (nb - 1 - j)) & 1U) {
                            one[no++] = metric[i];
                        } else {
                            zero[nz++] = metric[i];
                        }
                    }
                    llr[s * static_cast<std::size_t>(b) + static_cast<std::size_t>(axis.bit_positions[static_cast<std::size_t>(j)])] =
                        log_sum_exp(zero, nz) - log_sum_exp(one, no);
                }
            }
        }
        return;
    }
    const std::size_t k = c.points().size();
    std::vector<double> metric(k);
    std::vector<double> zero(k);
    std::vector<double> one(k);
    for (std::size_t s = 0; s < r.size(); ++s) {
        for (std::size_t i = 0; i < k; ++i) {
            metric[i] = -std::norm(r[s] - c.points()[i]) * inv_var;
        }
        for (int j = 0; j < b; ++j) {
            std::size_t nz = 0;
            std::size_t no = 0;
            for (std::size_t i = 0; i < k; ++i) {
                if ((i >> (b - 1 - j)) & 1U) {
                    one[no++] = metric[i];
                } else {
                    zero[nz++] = metric[i];
                }
            }
            llr[s * static_cast<std::size_t>(b) + static_cast<std::size_t>(j)] =
                log_sum_exp(zero.data(), nz) - log_sum_exp(one.data(), no);
        }
    }
}

double soft_symbols(std::span<const double> llr, const Constellation& c, std::span<cplx> mean) {
    const auto b = static_cast<std::size_t>(c.bits_per_symbol());
    if (!c.is_discrete() || llr.size() != mean.size() * b) {
        throw std::invalid_argument("soft_symbols: size mismatch or non-discrete constellation");
    }
    double var_sum = 0.0;
    std::vector<double> p0(b);
    for (std::size_t s = 0; s < mean.size(); ++s) {
        for (std::size_t j = 0; j < b; ++j) {
            // P(b = 0) = 1 / (1 + exp(-L)), evaluated without overflow.
            const double l = llr[s * b + j];
            p0[j] = l >= 0 ? 1.0 / (1.0 + std::exp(-l)) : std::exp(l) / (1.0 + std::exp(l));
        }
        if (c.is_separable()) {
            double var = 0.0;
            double comp[2];
            for (int ax = 0; ax < 2; ++ax) {
                const PamAxis& axis = ax == 0 ? c.axis_re() : c.axis_im();
                const std::size_t nb = axis.bit_positions.size();
                double m1 = 0.0;
                double m2 = 0.0;
                for (std::size_t i = 0; i < axis.levels.size(); ++i) {
                    double p = 1.0;
                    for (std::size_t j = 0; j < nb; ++j) {
                        const double q = p0[static_cast<std::size_t>(axis.bit_positions[j])];
                        p *= ((i >> (nb - 1 - j)) & 1U) ? 1.0 - q : q;
                    }
                    m1 += p * axis.levels[i];
                    m2 += p * axis.levels[i] * axis.levels[i];
                }
                comp[ax] = m1;
                var += m2 - m1 * m1;
            }
            mean[s] = cplx(comp[0], comp[1]);
            var_sum += std::max(var, 0.0);
        } else {
            cplx m1 = 0.0;
            double m2 = 0.0;
            for (std::size_t i = 0; i < c.points().size(); ++i) {
                double p = 1.0;
                for (std::size_t j = 0; j < b; ++j) {
                    p *= ((i >> (b - 1 - j)) & 1U) ? 1.0 - p0[j] : p0[j];
                }
                m1 += p * c.points()[i];
                m2 += p * std::norm(c.points()[i]);
            }
            mean[s] = m1;
            var_sum += std::max(m2 - std::norm(m1), 0.0);
        }
    }
    return var_sum / static_cast<double>(mean.size());
}

double mmse_exact(double rho, const Constellation& c, int kronrod_points) {
    if (rho < 0.0) {
        throw std::domain_error("mmse_exact: rho must be >= 0");
    }
    if (c.kind() == ConstellationKind::gaussian) {
        return 1.0 / (1.0 + rho);
    }
    if (rho == 0.0) {
        return 1.0;
    }
    if (c.is_separable()) {
        return axis_mmse(c.axis_re(), rho, kronrod_points) + axis_mmse(c.axis_im(), rho, kronrod_points);
    }
    return general_mmse(c.points(), rho, kronrod_points);
}

TransferCurve mmse_curve(const Constellation& c, const std::vector<double>& rho_grid) {
    for (std::size_t i = 0; i < rho_grid.size(); ++i) {
        if (rho_grid[i] < 0.0 || (i > 0 && !(rho_grid[i] > rho_grid[i - 1]))) {
            throw std::invalid_argument("mmse_curve: grid must be nonnegative and ascending");
        }
    }
    return TransferCurve::sample([&](double rho) { return mmse_exact(rho, c); }, rho_grid);
}

double mutual_information_bits(double rho, const Constellation& c) {
    if (rho < 0.0) {
        throw std::domain_error("mutual_information_bits: rho must be >= 0");
    }
    if (c.kind() == ConstellationKind::gaussian) {
        return std::log2(1.0 + rho);
    }
    if (rho == 0.0) {
        return 0.0;
    }
    if (c.is_separable()) {
        return axis_information_bits(c.axis_re(), rho) + axis_information_bits(c.axis_im(), rho);
    }
    return general_information_bits(c.points(), rho);
}

std::vector<double> default_rho_grid(double snr, std::size_t points) {
    if (!(snr > 1e-4) || points < 3) {
        throw std::invalid_argument("default_rho_grid: need snr > 1e-4 and at least 3 points");
    }
    auto g = log_grid(1e-4, snr, points - 1);
    g.insert(g.begin(), 0.0);
    return g;
}

} // namespace mamp
