#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mamp/transfer_curve.hpp"

namespace mamp {

using cplx = std::complex<double>;

enum class ConstellationKind { bpsk, qpsk, qam16, gaussian, custom };

/// One real axis of a separable (PAM x PAM) constellation.
struct PamAxis {
    /// levels[label] for the axis-local label formed by `bit_positions`
    /// (first listed position is the most significant).
    std::vector<double> levels;
    std::vector<int> bit_positions;
};

/// Unit-power input alphabet with uniform priors.
///
/// Symbol labels are integers whose bit b_0 is the most significant; point
/// `points()[label]` is the Gray-mapped symbol for that label. Observation
/// model throughout the module: r = sqrt(rho) x + z with z ~ CN(0, 1). BPSK
/// lives on the real axis, so only the real part of r (noise variance 1/2)
/// carries information and its posterior mean is tanh(2 sqrt(rho) Re r).
class Constellation {
public:
    static Constellation bpsk();
    static Constellation qpsk();
    static Constellation qam16();
    static Constellation gaussian();
    /// Arbitrary point set with natural-binary labels, rescaled to unit power.
    static Constellation custom(std::vector<cplx> points, std::string name = "custom");
    static Constellation by_name(const std::string& name);
    /// Text file with one "re im" pair per line.
    static Constellation load(const std::string& path);

    ConstellationKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<cplx>& points() const noexcept { return points_; }
    bool is_discrete() const noexcept { return kind_ != ConstellationKind::gaussian; }
    bool is_separable() const noexcept { return separable_; }
    bool unit_power() const noexcept { return unit_power_; }
    int bits_per_symbol() const noexcept { return bits_per_symbol_; }
    const PamAxis& axis_re() const noexcept { return axes_[0]; }
    const PamAxis& axis_im() const noexcept { return axes_[1]; }

    /// Scalar-channel MMSE via a cached log-spaced table; for hot loops
    /// (rate integrals). `mmse_exact` is the quadrature it is built from.
    double mmse(double rho) const;

private:
    Constellation() = default;
    struct MmseTable;

    ConstellationKind kind_ = ConstellationKind::gaussian;
    std::string name_;
    std::vector<cplx> points_;
    PamAxis axes_[2];
    bool separable_ = false;
    bool unit_power_ = true;
    int bits_per_symbol_ = 0;
    std::shared_ptr<MmseTable> table_;
};

struct ScalarPosterior {
    cplx mean;
    double var = 0.0;
};

/// Gray-maps groups of bits_per_symbol bits (first bit = b_0).
std::vector<cplx> modulate(std::span<const std::uint8_t> bits, const Constellation& c);

/// Exact Bayes posterior of x given r = sqrt(rho) x + z.
ScalarPosterior posterior(cplx r, double rho, const Constellation& c);

/// Posterior for r = x + g, g ~ CN(0, v), applied elementwise. Writes the
/// means and returns the average posterior variance.
double denoise(std::span<const cplx> r, double v, const Constellation& c, std::span<cplx> mean);

/// Exact per-bit LLRs log P(b=0|r)/P(b=1|r) for r = x + g, g ~ CN(0, v).
/// Output layout: symbol-major, bits_per_symbol entries per symbol.
void demap_llr(std::span<const cplx> r, double v, const Constellation& c, std::span<double> llr);

/// Symbol means and variances from independent bit LLRs (same layout as
/// demap_llr). Returns the average variance.
double soft_symbols(std::span<const double> llr, const Constellation& c, std::span<cplx> mean);

/// mmse{x | sqrt(rho) x + z} by adaptive Gauss-Kronrod quadrature
/// (closed form 1/(1+rho) for the Gaussian input). `kronrod_points` is 15,
/// 31 or 61.
double mmse_exact(double rho, const Constellation& c, int kronrod_points = 31);

/// The demodulation transfer function sampled on `rho_grid`.
TransferCurve mmse_curve(const Constellation& c, const std::vector<double>& rho_grid);

/// Scalar-channel mutual information I(x; sqrt(rho) x + z) in bits by direct
/// quadrature of the entropy integral (independent of the MMSE route).
double mutual_information_bits(double rho, const Constellation& c);

/// Default SINR grid: 0 followed by `points - 1` log-spaced values in
/// [1e-4, snr].
std::vector<double> default_rho_grid(double snr, std::size_t points = 200);

} // namespace mamp
