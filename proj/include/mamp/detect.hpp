#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mamp/channel.hpp"
#include "mamp/ldpc.hpp"
#include "mamp/modem.hpp"

namespace mamp {

enum class ThetaMode {
    adaptive, // 1 / (lambda_dagger + sigma^2 / v_t), v_t the input error variance
    spectral, // 1 / lambda_dagger
    schedule  // theta_schedule[t] (last entry repeats)
};

enum class XiMode { fixed_one, variance_min };

struct DetectorConfig {
    int max_iters = 30;
    std::size_t damping_window = 3;
    ThetaMode theta_mode = ThetaMode::adaptive;
    std::vector<double> theta_schedule;
    XiMode xi_mode = XiMode::variance_min;
    double convergence_tol = 1e-8; // stop when the posterior variance moves less than this
    int bp_iters = 100;
    bool unrolled_memory = false;  // MAMP: evaluate the filter as an explicit sum (testing)
    bool genie_variances = true;   // with truth: input error covariances measured against it
    double stop_mse = 0.0;         // with truth and > 0: stop once the posterior-mean MSE is at most this
    bool stop_when_settled = true; // stop once the denoiser reports valid codewords
};

struct IterationRecord {
    int iter = 0;
    double v_gamma = 0.0; // predicted error variance of r_t
    double v_phi = 0.0;   // posterior variance reported by the denoiser
    double ld_ms = 0.0;
    double nld_ms = 0.0;
    // Genie quantities (NaN without truth).
    double mse_r = NAN;
    double mse_x = NAN;       // posterior mean vs truth
    double corr_f = NAN;      // max_i |<f_i, g_t>| / N over the inputs seen so far
    double corr_f_last = NAN; // |<f_t, g_t>| / N
    double corr_x = NAN;      // |<x, g_t>| / N
    double kurtosis = NAN;    // excess kurtosis of Re/Im parts of g_t
    double unbias = NAN;      // Re <x, r_t> / <x, x>
    double damped_mse = NAN;  // error of the next input after damping
    double window_min_mse = NAN;
};

struct IterationTrace {
    std::vector<IterationRecord> records;
    // Genie mode: (1/N) <g_i, g_j> and (1/N) <f_i, f_j> over all iterations.
    Eigen::MatrixXcd cov_gamma;
    Eigen::MatrixXcd cov_phi;
    std::vector<double> g_samples; // Re/Im parts of every g_t, pooled (genie mode)

    /// Columns iter,v_gamma,v_phi,mse_r,mse_x,stage_ms.
    void write_csv(std::ostream& os) const;
};

struct DetectorDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Symbol-wise estimator for R = X + CN(0, v): writes posterior means and
/// returns the average posterior variance.
class Denoiser {
public:
    virtual ~Denoiser() = default;
    virtual double operator()(const CMatrix& r, double v, CMatrix& mean) = 0;
    /// True when the latest output can no longer improve (all codewords valid).
    virtual bool settled() const { return false; }
};

class ConstellationDenoiser final : public Denoiser {
public:
    explicit ConstellationDenoiser(Constellation c) : c_(std::move(c)) {}
    double operator()(const CMatrix& r, double v, CMatrix& mean) override;

private:
    Constellation c_;
};

/// Demapper plus BP decoder. The symbol stream is X in column-major order;
/// the first codewords * n / bits_per_symbol symbols carry consecutive
/// codewords and any remaining symbols are uncoded.
class CodedDenoiser final : public Denoiser {
public:
    CodedDenoiser(const LdpcCode& code, Constellation c, std::size_t codewords, int bp_iters);
    double operator()(const CMatrix& r, double v, CMatrix& mean) override;
    bool settled() const override { return all_valid_; }

    /// Hard decisions of the latest decoding, codewords back to back.
    const std::vector<std::uint8_t>& decoded_bits() const noexcept { return bits_; }
    /// Average BP iterations in the latest call.
    double mean_bp_iters() const noexcept { return bp_iters_used_; }

private:
    const LdpcCode& code_;
    Constellation c_;
    std::size_t codewords_;
    int bp_iters_;
    std::vector<std::uint8_t> bits_;
    double bp_iters_used_ = 0.0;
    bool all_valid_ = false;
};

struct DetectionResult {
    CMatrix x_hat;      // last posterior mean
    double v_hat = 1.0; // its reported variance
    CMatrix r;          // last linear-stage output
    double v_r = 1.0;   // its predicted error variance
    int iterations = 0;
    double setup_ms = 0.0; // work done once before the first iteration
    IterationTrace trace;
};

/// Memory AMP on Y = A X + N, N ~ CN(0, sigma2) entrywise; X has one column
/// per time slot. `truth` enables the genie diagnostics.
DetectionResult run_mamp(const CMatrix& y, const ChannelMatrix& a, double sigma2, Denoiser& nld,
                         const DetectorConfig& cfg, const CMatrix* truth = nullptr);

/// OAMP/VAMP with a Cholesky-based LMMSE stage each iteration.
DetectionResult run_oamp_vamp(const CMatrix& y, const ChannelMatrix& a, double sigma2, Denoiser& nld,
                              const DetectorConfig& cfg, const CMatrix* truth = nullptr);

struct CasResult {
    DetectionResult detection;
    std::vector<std::uint8_t> bits; // decoded codewords
};

/// Uncoded MAMP to its fixed point, then one demap + BP pass on the final
/// linear output. No decoder feedback.
CasResult run_cas_mamp(const CMatrix& y, const ChannelMatrix& a, double sigma2, const Constellation& c,
                       const LdpcCode& code, std::size_t codewords, const DetectorConfig& cfg,
                       const CMatrix* truth = nullptr);

} // namespace mamp
