#include "mamp/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

#include "mamp/rng.hpp"

namespace mamp {

SingularSpectrum::SingularSpectrum(std::size_t m, std::size_t n, std::vector<double> values)
    : m_(m), n_(n), values_(std::move(values)), beta_(0.0) {
    if (m == 0 || n == 0) {
        throw std::invalid_argument("SingularSpectrum: dimensions must be positive");
    }
    if (values_.size() != std::min(m, n)) {
        throw std::invalid_argument("SingularSpectrum: expected min(m, n) singular values");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
            throw std::invalid_argument("SingularSpectrum: singular values must be finite and >= 0");
        }
        if (i > 0 && values_[i] > values_[i - 1]) {
            throw std::invalid_argument("SingularSpectrum: singular values must be sorted descending");
        }
    }
    double energy = 0.0;
    for (double e : values_) {
        energy += e * e;
    }
    if (std::abs(energy - static_cast<double>(n)) > 1e-9 * static_cast<double>(n)) {
        throw std::invalid_argument("SingularSpectrum: sum of squared singular values must equal n");
    }
    beta_ = static_cast<double>(n) / static_cast<double>(m);
}

SingularSpectrum SingularSpectrum::normalized(std::size_t m, std::size_t n, std::vector<double> values) {
    std::sort(values.begin(), values.end(), std::greater<>());
    double energy = 0.0;
    for (double e : values) {
        energy += e * e;
    }
    if (!(energy > 0.0)) {
        throw std::invalid_argument("SingularSpectrum: all singular values are zero");
    }
    const double scale = std::sqrt(static_cast<double>(n) / energy);
    for (double& e : values) {
        e *= scale;
    }
    return SingularSpectrum(m, n, std::move(values));
}

std::vector<double> SingularSpectrum::aah_eigenvalues() const {
    std::vector<double> lambda(m_, 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        lambda[i] = values_[i] * values_[i];
    }
    return lambda;
}

bool SingularSpectrum::is_flat(double rel_tol) const {
    if (values_.size() != n_) {
        return false; // n > m leaves zero modes in A^H A
    }
    const double first = values_.front() * values_.front();
    const double last = values_.back() * values_.back();
    return first - last <= rel_tol * first;
}

ChannelMatrix::ChannelMatrix(CMatrix u, CMatrix v, SingularSpectrum spectrum)
    : u_(std::move(u)), v_(std::move(v)), spectrum_(std::move(spectrum)) {
    const auto t = static_cast<Eigen::Index>(spectrum_.rank_dim());
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(spectrum_.values().data(), t);
    a_ = u_.leftCols(t) * e.asDiagonal() * v_.leftCols(t).adjoint();
}

ChannelMatrix::ChannelMatrix(CMatrix u, CMatrix v, SingularSpectrum spectrum, CMatrix dense)
    : u_(std::move(u)), v_(std::move(v)), spectrum_(std::move(spectrum)), a_(std::move(dense)) {}

namespace {

CMatrix iid_gaussian(std::size_t m, std::size_t n, Rng& rng) {
    ComplexNormal cn(1.0);
    CMatrix g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            g(i, j) = cn(rng);
        }
    }
    return g;
}

} // namespace

ChannelMatrix gen_iid_gaussian(std::size_t m, std::size_t n, std::uint64_t seed) {
    if (m == 0 || n == 0) {
        throw std::invalid_argument("gen_iid_gaussian: dimensions must be positive");
    }
    Rng rng(seed);
    CMatrix a = iid_gaussian(m, n, rng);
    a *= std::sqrt(static_cast<double>(n) / a.squaredNorm());

    Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    std::vector<double> e(svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size());
    // Remove the last few ulps of drift so the spectrum invariant holds exactly.
    auto spectrum = SingularSpectrum::normalized(m, n, std::move(e));
    return ChannelMatrix(svd.matrixU(), svd.matrixV(), std::move(spectrum), std::move(a));
}

SingularSpectrum ill_conditioned_spectrum(std::size_t m, std::size_t n, double kappa) {
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
        throw std::domain_error("gen_ill_conditioned: kappa must be >= 1");
    }
    if (m == 0 || n == 0) {
        throw std::invalid_argument("gen_ill_conditioned: dimensions must be positive");
    }
    const std::size_t t = std::min(m, n);
    const double ratio = std::pow(kappa, 1.0 / static_cast<double>(t));
    std::vector<double> e(t);
    double energy = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        e[i] = std::pow(ratio, -static_cast<double>(i));
        energy += e[i] * e[i];
    }
    const double scale = std::sqrt(static_cast<double>(n) / energy);
    for (double& v : e) {
        v *= scale;
    }
    return SingularSpectrum(m, n, std::move(e));
}

ChannelMatrix gen_ill_conditioned(std::size_t m, std::size_t n, double kappa, std::uint64_t seed) {
    auto spectrum = ill_conditioned_spectrum(m, n, kappa);
    Rng rng(seed);
    const CMatrix g = iid_gaussian(m, n, rng);
    Eigen::BDCSVD<CMatrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return ChannelMatrix(svd.matrixU(), svd.matrixV(), std::move(spectrum));
}

SpectralMoments spectral_moments(const SingularSpectrum& spectrum, std::size_t horizon) {
    if (horizon == 0) {
        throw std::invalid_argument("spectral_moments: horizon must be >= 1");
    }
    const auto lambda = spectrum.aah_eigenvalues();
    SpectralMoments out;
    out.lambda_max = *std::max_element(lambda.begin(), lambda.end());
    out.lambda_min = *std::min_element(lambda.begin(), lambda.end());
    out.lambda_dagger = (out.lambda_min + out.lambda_max) / 2.0;
    out.b.assign(horizon + 1, 0.0);
    const double inv_m = 1.0 / static_cast<double>(lambda.size());
    for (double l : lambda) {
        const double beig = out.lambda_dagger - l;
        double p = 1.0;
        for (std::size_t k = 0; k <= horizon; ++k) {
            out.b[k] += p * inv_m;
            p *= beig;
        }
    }
    out.b[0] = 1.0;
    return out;
}

void write_spectrum(std::ostream& os, const SingularSpectrum& spectrum) {
    os << spectrum.m() << ' ' << spectrum.n() << '\n';
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    const auto& e = spectrum.values();
    for (std::size_t i = 0; i < e.size(); ++i) {
        os << (i ? " " : "") << e[i];
    }
    os << '\n';
}

SingularSpectrum read_spectrum(std::istream& is) {
    std::size_t m = 0;
    std::size_t n = 0;
    if (!(is >> m >> n)) {
        throw std::runtime_error("read_spectrum: malformed header, expected \"m n\"");
    }
    std::vector<double> e;
    double v = 0.0;
    while (is >> v) {
        e.push_back(v);
    }
    if (e.size() != std::min(m, n)) {
        std::ostringstream msg;
        msg << "read_spectrum: expected " << std::min(m, n) << " values, got " << e.size();
        throw std::runtime_error(msg.str());
    }
    return SingularSpectrum(m, n, std::move(e));
}

void save_spectrum(const std::string& path, const SingularSpectrum& spectrum) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("save_spectrum: cannot open " + path);
    }
    write_spectrum(os, spectrum);
}

SingularSpectrum load_spectrum(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("load_spectrum: cannot open " + path);
    }
    return read_spectrum(is);
}

} // namespace mamp
