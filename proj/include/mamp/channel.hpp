#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mamp {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Singular values of an M x N channel, normalised so that sum(e_i^2) == N.
///
/// `values` holds T = min(m, n) entries in descending order. Zero singular
/// values are stored explicitly; the remaining n - T transmit dimensions are
/// implicit zeros of A^H A.
class SingularSpectrum {
public:
    SingularSpectrum(std::size_t m, std::size_t n, std::vector<double> values);

    /// Rescales `values` so that sum(e_i^2) == n, sorts them descending.
    static SingularSpectrum normalized(std::size_t m, std::size_t n, std::vector<double> values);

    std::size_t m() const noexcept { return m_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t rank_dim() const noexcept { return values_.size(); }
    double beta() const noexcept { return beta_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Eigenvalues of A A^H: e_i^2 padded with zeros to length m, descending.
    std::vector<double> aah_eigenvalues() const;

    /// True when A^H A is a multiple of the identity (no zero modes, equal e_i).
    bool is_flat(double rel_tol = 1e-12) const;

    bool operator==(const SingularSpectrum&) const = default;

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> values_;
    double beta_;
};

/// Factored channel A = U diag(e) V^H with the dense product kept alongside.
class ChannelMatrix {
public:
    ChannelMatrix(CMatrix u, CMatrix v, SingularSpectrum spectrum);
    ChannelMatrix(CMatrix u, CMatrix v, SingularSpectrum spectrum, CMatrix dense);

    const CMatrix& u() const noexcept { return u_; }
    const CMatrix& v() const noexcept { return v_; }
    const SingularSpectrum& spectrum() const noexcept { return spectrum_; }
    const CMatrix& dense() const noexcept { return a_; }
    std::size_t m() const noexcept { return spectrum_.m(); }
    std::size_t n() const noexcept { return spectrum_.n(); }

private:
    CMatrix u_;
    CMatrix v_;
    SingularSpectrum spectrum_;
    CMatrix a_;
};

struct SpectralMoments {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double lambda_dagger = 0.0;
    /// b[k] = (1/M) tr{B^k}, B = lambda_dagger I - A A^H, k = 0..horizon.
    std::vector<double> b;
};

ChannelMatrix gen_iid_gaussian(std::size_t m, std::size_t n, std::uint64_t seed);

/// Geometric singular-value ladder e_i / e_{i+1} = kappa^{1/T}, i = 1..T-1,
/// with Haar-like factors taken from the SVD of a fresh IID Gaussian matrix.
/// The extreme ratio is therefore kappa^{(T-1)/T}.
ChannelMatrix gen_ill_conditioned(std::size_t m, std::size_t n, double kappa, std::uint64_t seed);

/// The ladder values alone, without drawing unitary factors.
SingularSpectrum ill_conditioned_spectrum(std::size_t m, std::size_t n, double kappa);

SpectralMoments spectral_moments(const SingularSpectrum& spectrum, std::size_t horizon);

/// Flat text format: line 1 "m n", line 2 the e_i separated by spaces.
void write_spectrum(std::ostream& os, const SingularSpectrum& spectrum);
SingularSpectrum read_spectrum(std::istream& is);
void save_spectrum(const std::string& path, const SingularSpectrum& spectrum);
SingularSpectrum load_spectrum(const std::string& path);

} // namespace mamp
