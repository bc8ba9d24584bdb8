#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mamp/modem.hpp"
#include "mamp/se.hpp"
#include "mamp/transfer_curve.hpp"

namespace mamp {

struct RateResult {
    double rate_bits = 0.0;           // per transmit symbol
    TransferCurve integrand_samples;  // what was integrated (for plotting)
    double rho_upper = 0.0;           // upper integration limit
};

/// A code curve that crosses min{demodulator mmse, eta^-1}.
struct RateConstraintViolation : std::domain_error {
    RateConstraintViolation(const std::string& what, double at) : std::domain_error(what), rho(at) {}
    double rho;
};

struct RateOptions {
    std::size_t points_per_decade = 16; // base grid of the piecewise integration
    double rho_min = 1e-6;              // first log-grid point; [0, rho_min] is one piece
    double abs_tol = 1e-7;              // quadrature error budget in nats, split evenly over pieces
};

/// Integral of the piecewise-linear curve from 0 up to its first zero
/// (or its last abscissa), converted to bits.
RateResult achievable_rate(const TransferCurve& curve_c);

/// Same, after checking curve_c(rho) < min{mmse(rho), eta_se_inv(rho)} at
/// every abscissa in (0, snr] where curve_c exceeds `zero_tol`.
/// Throws RateConstraintViolation naming the first offending rho.
RateResult achievable_rate(const TransferCurve& curve_c, const VseModel& model, const Constellation& c,
                           double zero_tol = 1e-9);

/// Integral of an exact curve over [0, rho_upper] in bits; `breakpoints`
/// are kinks the integration must not straddle.
double integrate_curve_bits(const std::function<double(double)>& f, double rho_upper,
                            std::vector<double> breakpoints = {}, const RateOptions& opts = {});

/// min{mmse(rho), eta_se_inv(rho)}: the largest admissible code curve.
double rate_integrand(double rho, const VseModel& model, const Constellation& c);

/// Abscissas in (0, snr) where the demodulator curve and eta^-1 cross.
std::vector<double> integrand_kinks(const VseModel& model, const Constellation& c, const RateOptions& opts = {});

/// Maximum rate: the integrand above over [0, snr].
RateResult max_rate(const VseModel& model, const Constellation& c, const RateOptions& opts = {});

/// Rate of the uncoded-detection-then-decode receiver: the same integrand
/// up to the uncoded fixed point rho*_gamma only.
RateResult cas_rate(const VseModel& model, const Constellation& c, const RateOptions& opts = {});

/// (1/n) sum_i log2(1 + snr e_i^2): Gaussian-input constrained capacity.
double capacity_gaussian(const SingularSpectrum& spectrum, double snr);

/// SNR in dB at which max_rate reaches `target_rate` bits (bisection to
/// 0.01 dB over [lo_db, hi_db]). Throws std::domain_error if unreachable.
double snr_limit_for_rate(const Constellation& c, const SingularSpectrum& spectrum, double target_rate,
                          double lo_db = -20.0, double hi_db = 60.0);

/// Entropy ceiling log2 |C| (infinite for Gaussian input).
double rate_ceiling(const Constellation& c);

struct RateRow {
    double snr_db = 0.0;
    double rate_mamp = 0.0;
    double rate_cas = 0.0;
    double capacity_gaussian = 0.0;
};

/// Rate-vs-SNR table for one constellation, parallel over SNR points.
std::vector<RateRow> rate_table(const SingularSpectrum& spectrum, const Constellation& c,
                                const std::vector<double>& snr_db, unsigned workers = 1, const RateOptions& opts = {});

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

} // namespace mamp
