#include "mamp/detect.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>

#include "mamp/se.hpp"

namespace mamp {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kVarFloor = 1e-12; // keeps the denoiser's exponents finite

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

cplx inner(const CMatrix& a, const CMatrix& b) { return a.reshaped().dot(b.reshaped()); }

double mean_sq(const CMatrix& a) { return a.squaredNorm() / static_cast<double>(a.size()); }

void require_finite(const CMatrix& m, const char* what, int iter) {
    if (!m.allFinite()) {
        std::ostringstream msg;
        msg << "detector diverged: non-finite " << what << " at iteration " << iter;
        throw DetectorDivergence(msg.str());
    }
}

void require_finite(double v, const char* what, int iter) {
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "detector diverged: " << what << " = " << v << " at iteration " << iter;
        throw DetectorDivergence(msg.str());
    }
}

double excess_kurtosis(const CMatrix& g, std::vector<double>* pool) {
    std::vector<double> v;
    v.reserve(2 * static_cast<std::size_t>(g.size()));
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        v.push_back(g.data()[i].real());
        v.push_back(g.data()[i].imag());
    }
    double mean = 0.0;
    for (double s : v) {
        mean += s;
    }
    mean /= static_cast<double>(v.size());
    double m2 = 0.0;
    double m4 = 0.0;
    for (double s : v) {
        const double d = (s - mean) * (s - mean);
        m2 += d;
        m4 += d * d;
    }
    m2 /= static_cast<double>(v.size());
    m4 /= static_cast<double>(v.size());
    if (pool) {
        pool->insert(pool->end(), v.begin(), v.end());
    }
    return m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
}

// Genie bookkeeping shared by both detectors.
struct Genie {
    const CMatrix* x = nullptr;
    std::vector<CMatrix> f; // input errors
    std::vector<CMatrix> g; // linear-stage output errors

    void observe(IterationRecord& rec, const CMatrix& input, const CMatrix& r, const CMatrix& xhat,
                 IterationTrace& trace) {
        if (!x) {
            return;
        }
        const double nl = static_cast<double>(x->size());
        f.push_back(input - *x);
        g.push_back(r - *x);
        const CMatrix& gt = g.back();
        rec.mse_r = mean_sq(gt);
        rec.mse_x = mean_sq(xhat - *x);
        rec.corr_f = 0.0;
        for (const auto& fi : f) {
            rec.corr_f = std::max(rec.corr_f, std::abs(inner(fi, gt)) / nl);
        }
        rec.corr_f_last = std::abs(inner(f.back(), gt)) / nl;
        rec.corr_x = std::abs(inner(*x, gt)) / nl;
        rec.kurtosis = excess_kurtosis(gt, &trace.g_samples);
        rec.unbias = inner(*x, r).real() / x->squaredNorm();
    }

    void finish(IterationTrace& trace) const {
        if (!x) {
            return;
        }
        const double nl = static_cast<double>(x->size());
        const auto t = static_cast<Eigen::Index>(g.size());
        trace.cov_gamma.resize(t, t);
        trace.cov_phi.resize(t, t);
        for (Eigen::Index i = 0; i < t; ++i) {
            for (Eigen::Index j = 0; j < t; ++j) {
                trace.cov_gamma(i, j) = inner(g[i], g[j]) / nl;
                trace.cov_phi(i, j) = inner(f[i], f[j]) / nl;
            }
        }
    }
};

double pick_theta(const DetectorConfig& cfg, int t, double lambda_dagger, double sigma2, double v_in) {
    switch (cfg.theta_mode) {
    case ThetaMode::adaptive:
        return 1.0 / (lambda_dagger + sigma2 / v_in);
    case ThetaMode::spectral:
        return 1.0 / lambda_dagger;
    case ThetaMode::schedule:
        if (cfg.theta_schedule.empty()) {
            return 1.0 / lambda_dagger;
        }
        return cfg.theta_schedule[std::min<std::size_t>(static_cast<std::size_t>(t - 1), cfg.theta_schedule.size() - 1)];
    }
    return 1.0 / lambda_dagger;
}

// Minimum-variance affine weights: zeta = V^-1 1 / (1' V^-1 1).
// argmin z^T V z over the simplex {z >= 0, sum z = 1}: every support is
// tried with the equality-constrained solution, the best feasible one kept.
Eigen::VectorXd damping_weights(Eigen::MatrixXd v) {
    const auto k = v.rows();
    const double jitter = 1e-12 * std::max(v.trace() / static_cast<double>(k), 1e-300);
    v.diagonal().array() += jitter;
    Eigen::VectorXd best = Eigen::VectorXd::Unit(k, k - 1);
    double best_val = v(k - 1, k - 1);
    for (unsigned mask = 1; mask < (1U << k); ++mask) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (mask & (1U << i)) {
                idx.push_back(i);
            }
        }
        const auto s = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd sub(s, s);
        for (Eigen::Index a = 0; a < s; ++a) {
            for (Eigen::Index b = 0; b < s; ++b) {
                sub(a, b) = v(idx[a], idx[b]);
            }
        }
        const Eigen::VectorXd sol = sub.ldlt().solve(Eigen::VectorXd::Ones(s));
        const double total = sol.sum();
        if (!sol.allFinite() || !(total > 0.0) || (sol.array() < 0.0).any()) {
            continue;
        }
        Eigen::VectorXd zeta = Eigen::VectorXd::Zero(k);
        for (Eigen::Index a = 0; a < s; ++a) {
            zeta(idx[a]) = sol(a) / total;
        }
        const double val = zeta.dot(v * zeta);
        if (val < best_val) {
            best_val = val;
            best = zeta;
        }
    }
    return best;
}

} // namespace

void IterationTrace::write_csv(std::ostream& os) const {
    os << "iter,v_gamma,v_phi,mse_r,mse_x,stage_ms\n";
    os.precision(10);
    for (const auto& r : records) {
        os << r.iter << ',' << r.v_gamma << ',' << r.v_phi << ',' << r.mse_r << ',' << r.mse_x << ','
           << r.ld_ms + r.nld_ms << '\n';
    }
}

double ConstellationDenoiser::operator()(const CMatrix& r, double v, CMatrix& mean) {
    mean.resize(r.rows(), r.cols());
    const auto n = static_cast<std::size_t>(r.size());
    return denoise(std::span<const cplx>(r.data(), n), v, c_, std::span<cplx>(mean.data(), n));
}

CodedDenoiser::CodedDenoiser(const LdpcCode& code, Constellation c, std::size_t codewords, int bp_iters)
    : code_(code), c_(std::move(c)), codewords_(codewords), bp_iters_(bp_iters) {
    if (!c_.is_discrete() || code_.n() % static_cast<std::size_t>(c_.bits_per_symbol()) != 0) {
        throw std::invalid_argument("CodedDenoiser: code length must be a multiple of the bits per symbol");
    }
}

double CodedDenoiser::operator()(const CMatrix& r, double v, CMatrix& mean) {
    mean.resize(r.rows(), r.cols());
    const std::size_t total = static_cast<std::size_t>(r.size());
    const std::size_t per_cw = code_.n() / static_cast<std::size_t>(c_.bits_per_symbol());
    if (codewords_ * per_cw > total) {
        throw std::invalid_argument("CodedDenoiser: frame holds fewer symbols than the codewords need");
    }
    bits_.clear();
    std::vector<double> llr(code_.n());
    double var_sum = 0.0;
    double iters = 0.0;
    all_valid_ = true;
    for (std::size_t k = 0; k < codewords_; ++k) {
        const std::span<const cplx> rk(r.data() + k * per_cw, per_cw);
        demap_llr(rk, v, c_, llr);
        const auto bp = bp_decode(code_, llr, bp_iters_);
        var_sum += soft_symbols(bp.llr_post, c_, std::span<cplx>(mean.data() + k * per_cw, per_cw)) *
                   static_cast<double>(per_cw);
        bits_.insert(bits_.end(), bp.hard.begin(), bp.hard.end());
        iters += bp.iterations;
        all_valid_ = all_valid_ && bp.converged;
    }
    const std::size_t coded = codewords_ * per_cw;
    if (coded < total) {
        const std::size_t rest = total - coded;
        var_sum += denoise(std::span<const cplx>(r.data() + coded, rest), v, c_,
                           std::span<cplx>(mean.data() + coded, rest)) *
                   static_cast<double>(rest);
    }
    bp_iters_used_ = codewords_ ? iters / static_cast<double>(codewords_) : 0.0;
    return var_sum / static_cast<double>(total);
}

DetectionResult run_mamp(const CMatrix& y, const ChannelMatrix& a, double sigma2, Denoiser& nld,
                         const DetectorConfig& cfg, const CMatrix* truth) {
    const auto t_setup = Clock::now();
    const CMatrix& A = a.dense();
    const auto n_tx = static_cast<Eigen::Index>(a.n());
    const auto m_rx = static_cast<Eigen::Index>(a.m());
    const Eigen::Index slots = y.cols();
    if (y.rows() != m_rx || (truth && (truth->rows() != n_tx || truth->cols() != slots))) {
        throw std::invalid_argument("run_mamp: dimension mismatch");
    }
    if (cfg.max_iters < 1 || cfg.damping_window < 1) {
        throw std::invalid_argument("run_mamp: max_iters and damping_window must be >= 1");
    }
    const double n = static_cast<double>(a.n());
    const double nl = n * static_cast<double>(slots);

    // Eigenvalues of A A^H carrying signal, and B = lambda_dagger I - A A^H on them.
    const auto& e = a.spectrum().values();
    const auto t_dim = static_cast<Eigen::Index>(e.size());
    Eigen::VectorXd lam(t_dim);
    for (Eigen::Index j = 0; j < t_dim; ++j) {
        lam(j) = e[static_cast<std::size_t>(j)] * e[static_cast<std::size_t>(j)];
    }
    const double ld = spectral_moments(a.spectrum(), 1).lambda_dagger;
    const Eigen::VectorXd beta = ld - lam.array();
    const Eigen::VectorXd lam2 = lam.array().square();
    const double w0 = lam.sum() / n;
    const double lam2_mean = lam2.sum() / n;
    const double noise_share = static_cast<double>(a.m()) / n * sigma2;
    auto resid_cov = [&](const CMatrix& z1, const CMatrix& z2) {
        return (inner(z1, z2).real() / nl - noise_share) / w0;
    };

    std::vector<CMatrix> xs{CMatrix::Zero(n_tx, slots)};
    std::vector<CMatrix> zs{y};
    const bool genie_var = truth && cfg.genie_variances;
    // Error covariance of the inputs x_i.
    Eigen::MatrixXd V = Eigen::MatrixXd::Constant(1, 1, genie_var ? mean_sq(*truth) : 1.0);
    Eigen::MatrixXd C(t_dim, 0);                              // C(j, i) = vartheta_{t,i} beta_j^{t-i}
    std::vector<double> vartheta;
    CMatrix gtil = CMatrix::Zero(m_rx, slots);
    CMatrix h = CMatrix::Zero(n_tx, slots);
    Genie genie{truth, {}, {}};
    DetectionResult res;
    double v_prev = std::numeric_limits<double>::infinity();
    res.setup_ms = ms_since(t_setup);

    for (int t = 1; t <= cfg.max_iters; ++t) {
        IterationRecord rec;
        rec.iter = t;
        const auto t0 = Clock::now();
        const auto k = static_cast<Eigen::Index>(xs.size());
        const double v_in = std::max(V(k - 1, k - 1), kVarFloor);
        const double theta = pick_theta(cfg, t, ld, sigma2, v_in);
        if (k > 1) {
            C = (theta * beta).asDiagonal() * C;
        }

        // Error variance of r_t as a ratio of a quadratic and a squared linear function of xi.
        const Eigen::VectorXd s0 = C.rowwise().sum();
        const Eigen::VectorXd q0 = C.transpose() * lam / n;
        const double eps0 = q0.sum();
        const Eigen::MatrixXd V00 = V.topLeftCorner(k - 1, k - 1);
        const Eigen::VectorXd v0t = V.col(k - 1).head(k - 1);
        const double vtt = V(k - 1, k - 1);
        const double qa = sigma2 * w0 + vtt * (lam2_mean - w0 * w0);
        const double qb = sigma2 * lam.dot(s0) / n + lam2.dot(C * v0t) / n - w0 * q0.dot(v0t);
        const Eigen::MatrixXd CV = C * V00;
        const double qc = sigma2 * lam.dot(s0.cwiseProduct(s0)) / n +
                          lam2.dot(CV.cwiseProduct(C).rowwise().sum()) / n - q0.dot(V00 * q0);
        auto ratio = [&](double xi) {
            const double eps = eps0 + xi * w0;
            return (qa * xi * xi + 2.0 * qb * xi + qc) / (eps * eps);
        };
        double xi = 1.0;
        if (cfg.xi_mode == XiMode::variance_min && k > 1) {
            const double den = qa * eps0 - qb * w0;
            const double cand = (w0 * qc - qb * eps0) / den;
            if (std::isfinite(cand) && eps0 + cand * w0 > 0.0 && ratio(cand) < ratio(1.0)) {
                xi = cand;
            }
        }
        const double v_gamma = std::max(ratio(xi), kVarFloor);
        C.conservativeResize(t_dim, k);
        C.col(k - 1).setConstant(xi);
        const Eigen::VectorXd q = C.transpose() * lam / n;
        const double eps = q.sum();
        require_finite(eps, "normalization", t);

        if (!cfg.unrolled_memory) {
            gtil = theta * (ld * gtil - A * h) + xi * zs.back();
        } else {
            for (auto& c : vartheta) {
                c *= theta;
            }
            vartheta.push_back(xi);
            gtil.setZero();
            for (std::size_t i = 0; i < vartheta.size(); ++i) {
                CMatrix term = zs[i];
                for (std::size_t p = i + 1; p < vartheta.size(); ++p) {
                    term = ld * term - A * (A.adjoint() * term);
                }
                gtil += vartheta[i] * term;
            }
        }
        h = A.adjoint() * gtil;
        CMatrix r = h;
        for (Eigen::Index i = 0; i < k; ++i) {
            r += q(i) * xs[static_cast<std::size_t>(i)];
        }
        r /= eps;
        require_finite(r, "linear output", t);
        rec.ld_ms = ms_since(t0);

        const auto t1 = Clock::now();
        CMatrix xhat;
        const double vhat = nld(r, v_gamma, xhat);
        require_finite(xhat, "denoiser output", t);
        const double w = std::min(vhat / v_gamma, 1.0 - 1e-12);
        const CMatrix xbar = (xhat - w * r) / (1.0 - w);
        const CMatrix zbar = y - A * xbar;

        // Covariances of the orthogonalized output with every stored input.
        Eigen::VectorXd u(k);
        double ubb = 0.0;
        if (genie_var) {
            const CMatrix fb = xbar - *truth;
            for (Eigen::Index i = 0; i < k; ++i) {
                u(i) = inner(fb, xs[static_cast<std::size_t>(i)] - *truth).real() / nl;
            }
            ubb = std::max(mean_sq(fb), kVarFloor);
        } else {
            for (Eigen::Index i = 0; i < k; ++i) {
                u(i) = resid_cov(zbar, zs[static_cast<std::size_t>(i)]);
            }
            ubb = std::max(resid_cov(zbar, zbar), kVarFloor);
        }
        const Eigen::Index prev = std::min<Eigen::Index>(static_cast<Eigen::Index>(cfg.damping_window) - 1, k);
        Eigen::MatrixXd Vc(prev + 1, prev + 1);
        for (Eigen::Index p = 0; p < prev; ++p) {
            for (Eigen::Index q2 = 0; q2 < prev; ++q2) {
                Vc(p, q2) = V(k - prev + p, k - prev + q2);
            }
            Vc(p, prev) = Vc(prev, p) = u(k - prev + p);
        }
        Vc(prev, prev) = ubb;
        const Eigen::VectorXd zeta = damping_weights(Vc);
        CMatrix x_next = zeta(prev) * xbar;
        CMatrix z_next = zeta(prev) * zbar;
        Eigen::VectorXd row = zeta(prev) * u;
        for (Eigen::Index p = 0; p < prev; ++p) {
            const auto idx = static_cast<std::size_t>(k - prev + p);
            x_next += zeta(p) * xs[idx];
            z_next += zeta(p) * zs[idx];
            row += zeta(p) * V.row(k - prev + p).transpose();
        }
        const double v_next = std::max(zeta.dot(Vc * zeta), kVarFloor);
        V.conservativeResize(k + 1, k + 1);
        V.row(k).head(k) = row.transpose();
        V.col(k).head(k) = row;
        V(k, k) = v_next;
        rec.nld_ms = ms_since(t1);

        rec.v_gamma = v_gamma;
        rec.v_phi = vhat;
        genie.observe(rec, xs.back(), r, xhat, res.trace);
        if (truth) {
            rec.damped_mse = mean_sq(x_next - *truth);
            rec.window_min_mse = mean_sq(xbar - *truth);
            for (Eigen::Index p = 0; p < prev; ++p) {
                rec.window_min_mse = std::min(rec.window_min_mse,
                                              mean_sq(xs[static_cast<std::size_t>(k - prev + p)] - *truth));
            }
        }
        xs.push_back(std::move(x_next));
        zs.push_back(std::move(z_next));
        res.trace.records.push_back(rec);
        res.x_hat = std::move(xhat);
        res.v_hat = vhat;
        res.r = std::move(r);
        res.v_r = v_gamma;
        res.iterations = t;
        if (std::abs(vhat - v_prev) < cfg.convergence_tol || (truth && cfg.stop_mse > 0.0 && rec.mse_x <= cfg.stop_mse) ||
            (cfg.stop_when_settled && nld.settled())) {
            break;
        }
        v_prev = vhat;
    }
    genie.finish(res.trace);
    return res;
}

DetectionResult run_oamp_vamp(const CMatrix& y, const ChannelMatrix& a, double sigma2, Denoiser& nld,
                              const DetectorConfig& cfg, const CMatrix* truth) {
    const auto t_setup = Clock::now();
    const CMatrix& A = a.dense();
    const auto n_tx = static_cast<Eigen::Index>(a.n());
    const auto m_rx = static_cast<Eigen::Index>(a.m());
    const Eigen::Index slots = y.cols();
    if (y.rows() != m_rx || (truth && (truth->rows() != n_tx || truth->cols() != slots))) {
        throw std::invalid_argument("run_oamp_vamp: dimension mismatch");
    }
    if (cfg.max_iters < 1) {
        throw std::invalid_argument("run_oamp_vamp: max_iters must be >= 1");
    }
    const VseModel model(a.spectrum(), 1.0 / sigma2);
    const CMatrix gram = A * A.adjoint();
    const bool genie_var = truth && cfg.genie_variances;
    CMatrix x = CMatrix::Zero(n_tx, slots);
    double v = 1.0;
    Genie genie{truth, {}, {}};
    DetectionResult res;
    double v_prev = std::numeric_limits<double>::infinity();
    res.setup_ms = ms_since(t_setup);

    for (int t = 1; t <= cfg.max_iters; ++t) {
        IterationRecord rec;
        rec.iter = t;
        const auto t0 = Clock::now();
        CMatrix k = v * gram;
        k.diagonal().array() += sigma2;
        const Eigen::LLT<CMatrix> chol(k);
        if (chol.info() != Eigen::Success) {
            throw DetectorDivergence("detector diverged: LMMSE system not positive definite at iteration " +
                                     std::to_string(t));
        }
        const CMatrix x_ld = x + v * (A.adjoint() * chol.solve(y - A * x));
        const double gam = model.gamma_hat(v);
        const double v_gamma = 1.0 / model.extrinsic_sinr(v);
        const CMatrix r = v_gamma * (x_ld / gam - x / v);
        require_finite(r, "linear output", t);
        require_finite(v_gamma, "linear-stage variance", t);
        rec.ld_ms = ms_since(t0);

        const auto t1 = Clock::now();
        CMatrix xhat;
        const double vhat = nld(r, v_gamma, xhat);
        require_finite(xhat, "denoiser output", t);
        const double w = std::min(vhat / v_gamma, 1.0 - 1e-12);
        CMatrix x_next = (xhat - w * r) / (1.0 - w);
        const double v_next = std::max(genie_var ? mean_sq(x_next - *truth) : vhat / (1.0 - w), kVarFloor);
        rec.nld_ms = ms_since(t1);

        rec.v_gamma = v_gamma;
        rec.v_phi = vhat;
        genie.observe(rec, x, r, xhat, res.trace);
        if (truth) {
            rec.damped_mse = mean_sq(x_next - *truth);
        }
        res.trace.records.push_back(rec);
        x = std::move(x_next);
        v = v_next;
        res.x_hat = std::move(xhat);
        res.v_hat = vhat;
        res.r = r;
        res.v_r = v_gamma;
        res.iterations = t;
        if (std::abs(vhat - v_prev) < cfg.convergence_tol || (truth && cfg.stop_mse > 0.0 && rec.mse_x <= cfg.stop_mse) ||
            (cfg.stop_when_settled && nld.settled())) {
            break;
        }
        v_prev = vhat;
    }
    genie.finish(res.trace);
    return res;
}

CasResult run_cas_mamp(const CMatrix& y, const ChannelMatrix& a, double sigma2, const Constellation& c,
                       const LdpcCode& code, std::size_t codewords, const DetectorConfig& cfg,
                       const CMatrix* truth) {
    ConstellationDenoiser uncoded(c);
    CasResult out;
    out.detection = run_mamp(y, a, sigma2, uncoded, cfg, truth);
    CodedDenoiser decoder(code, c, codewords, cfg.bp_iters);
    CMatrix mean;
    decoder(out.detection.r, out.detection.v_r, mean);
    out.bits = decoder.decoded_bits();
    return out;
}

} // namespace mamp
