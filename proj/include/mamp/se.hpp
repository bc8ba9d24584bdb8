#pragma once

#include <functional>
#include <vector>

#include "mamp/channel.hpp"
#include "mamp/transfer_curve.hpp"

namespace mamp {

/// Spectrum plus SNR: everything the state evolution needs.
class VseModel {
public:
    VseModel(SingularSpectrum spectrum, double snr);

    const SingularSpectrum& spectrum() const noexcept { return spectrum_; }
    double snr() const noexcept { return snr_; }
    double rho_max() const noexcept { return snr_; }

    /// Posterior variance of the LMMSE stage at prior variance u > 0:
    /// (1/n) [sum_i (snr e_i^2 + 1/u)^-1 + (n - T) u].
    double gamma_hat(double u) const;
    /// Extrinsic SINR leaving the LMMSE stage at prior variance u,
    /// 1/gamma_hat(u) - 1/u, evaluated without cancellation. u = 0 gives
    /// the mean of snr e_i^2 over n.
    double extrinsic_sinr(double u) const;

    /// sup_u gamma_hat(u); +inf when some transmit dimension is unobserved.
    double gamma_hat_limit() const noexcept { return v_limit_; }
    /// inf_u extrinsic_sinr(u) (0 when unobserved dimensions exist).
    double sinr_floor() const noexcept { return rho_floor_; }
    /// extrinsic_sinr(0).
    double sinr_ceiling() const noexcept { return rho_ceiling_; }

private:
    SingularSpectrum spectrum_;
    double snr_;
    std::vector<double> s_;   // snr e_i^2 for nonzero e_i
    double unobserved_ = 0.0; // n - (number of nonzero e_i)
    double v_limit_ = 0.0;
    double rho_floor_ = 0.0;
    double rho_ceiling_ = 0.0;
};

struct FixedPoint {
    double rho_star = 0.0;
    double v_star = 0.0;
};

/// LMMSE posterior variance at prior variance v. Throws std::domain_error for v <= 0.
double gamma_hat_se(double v, const VseModel& model);

/// Inverse of gamma_hat_se by bisection (relative tolerance 1e-12). Throws
/// std::domain_error outside (0, gamma_hat_limit). With snr = 0 it is the identity.
double gamma_hat_se_inv(double vhat, const VseModel& model);

/// 1/v - 1/gamma_hat_se_inv(v). Defined for v in (0, gamma_hat_limit);
/// v = 0 gives the SINR ceiling. Throws std::domain_error otherwise.
double eta_se(double v, const VseModel& model);

/// Decoder variance v with eta_se(v) = rho, by bisection on the prior
/// variance. Conventions outside the range of eta_se:
///  - rho >= sinr ceiling: 0 (the constraint wall at rho_max),
///  - rho <= sinr floor: 1/rho, the continuation of the curve at
///    gamma_hat_limit (for a flat spectrum this is the whole range below
///    snr, where the constraint never binds since mmse(rho) < 1/rho).
/// Throws std::domain_error for rho <= 0 or rho > rho_max.
double eta_se_inv(double rho, const VseModel& model);

/// Same as eta_se, but v >= gamma_hat_limit maps to 1/v (continuation).
double eta_se_extended(double v, const VseModel& model);

struct VseStep {
    double rho = 0.0;
    double v = 0.0;
};

struct VseTrajectory {
    std::vector<VseStep> steps;
    FixedPoint limit;
    bool converged = false;
};

/// Iterates rho_t = eta_se(v_{t-1}), v_t = phi(rho_t). The first LMMSE pass
/// uses unit prior variance, i.e. rho_1 = 1/gamma_hat_se(1) - 1. Stops when
/// |v_t - v_{t-1}| < 1e-12 or after max_iters.
VseTrajectory vse_trajectory(const VseModel& model, const std::function<double(double)>& phi, int max_iters);
VseTrajectory vse_trajectory(const VseModel& model, const TransferCurve& denoiser_curve, int max_iters);

/// First crossing of phi and eta_se_inv above rho_1 (the fixed point the
/// trajectory converges to), by a scan plus bisection to 1e-13 relative.
/// Returns {rho_max, phi(rho_max)} when phi stays below the curve.
FixedPoint vse_fixed_point(const VseModel& model, const std::function<double(double)>& phi);

TransferCurve gamma_hat_curve(const VseModel& model, const std::vector<double>& v_grid);
TransferCurve eta_inv_curve(const VseModel& model, const std::vector<double>& rho_grid);

} // namespace mamp
