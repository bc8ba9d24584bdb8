#include "mamp/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mamp/parallel.hpp"
#include "mamp/rng.hpp"

namespace mamp {

BpResult bp_decode(const LdpcCode& code, std::span<const double> llr_in, int max_iters) {
    const std::size_t n = code.n();
    if (llr_in.size() != n) {
        throw std::invalid_argument("bp_decode: expected " + std::to_string(n) + " LLRs");
    }
    const auto& edge_var = code.edge_var();
    const auto& check_offset = code.check_offset();
    const auto& var_offset = code.var_offset();
    const auto& var_edges = code.var_edges();
    const std::size_t edges = edge_var.size();
    // tanh(kLlrClip / 2) caps the check output at kLlrClip.
    const double t_max = std::tanh(kLlrClip / 2.0);

    BpResult out;
    out.llr_post.resize(n);
    out.hard.assign(n, 0);
    std::vector<double> channel(n);
    for (std::size_t v = 0; v < n; ++v) {
        if (!std::isfinite(llr_in[v]) && !std::isinf(llr_in[v])) {
            throw std::invalid_argument("bp_decode: NaN input LLR");
        }
        channel[v] = std::clamp(llr_in[v], -kLlrClip, kLlrClip);
        out.llr_post[v] = channel[v];
        out.hard[v] = channel[v] < 0.0;
    }
    std::vector<double> to_check(edges);
    std::vector<double> to_var(edges, 0.0);
    std::vector<double> t(edges);
    for (std::size_t e = 0; e < edges; ++e) {
        to_check[e] = channel[edge_var[e]];
    }
    for (int it = 1; it <= max_iters; ++it) {
        for (std::size_t c = 0; c + 1 < check_offset.size(); ++c) {
            const std::size_t lo = check_offset[c];
            const std::size_t hi = check_offset[c + 1];
            // Leave-one-out products via a forward and a backward pass.
            double prod = 1.0;
            for (std::size_t e = lo; e < hi; ++e) {
                t[e] = std::tanh(0.5 * to_check[e]);
                to_var[e] = prod;
                prod *= t[e];
            }
            prod = 1.0;
            for (std::size_t e = hi; e-- > lo;) {
                const double p = std::clamp(to_var[e] * prod, -t_max, t_max);
                to_var[e] = 2.0 * std::atanh(p);
                prod *= t[e];
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            double total = channel[v];
            for (std::size_t k = var_offset[v]; k < var_offset[v + 1]; ++k) {
                total += to_var[var_edges[k]];
            }
            out.llr_post[v] = total;
            out.hard[v] = total < 0.0;
            for (std::size_t k = var_offset[v]; k < var_offset[v + 1]; ++k) {
                const auto e = var_edges[k];
                to_check[e] = std::clamp(total - to_var[e], -kLlrClip, kLlrClip);
            }
        }
        out.iterations = it;
        bool ok = true;
        for (std::size_t c = 0; c + 1 < check_offset.size() && ok; ++c) {
            unsigned parity = 0;
            for (std::size_t e = check_offset[c]; e < check_offset[c + 1]; ++e) {
                parity ^= out.hard[edge_var[e]];
            }
            ok = parity == 0;
        }
        if (ok) {
            out.converged = true;
            break;
        }
    }
    return out;
}

TransferCurve measure_decoder_transfer(const LdpcCode& code, const Constellation& c,
                                       const std::vector<double>& rho_grid, std::size_t trials,
                                       std::uint64_t seed, int max_iters, unsigned workers) {
    if (trials == 0) {
        throw std::invalid_argument("measure_decoder_transfer: trials must be >= 1");
    }
    if (!c.is_discrete()) {
        throw std::invalid_argument("measure_decoder_transfer: needs a discrete constellation");
    }
    const auto bits = static_cast<std::size_t>(c.bits_per_symbol());
    if (code.n() % bits != 0) {
        throw std::invalid_argument("measure_decoder_transfer: code length not a multiple of bits per symbol");
    }
    const std::size_t symbols = code.n() / bits;
    const std::size_t points = rho_grid.size();
    std::vector<double> mse(points * trials);
    parallel_for(points * trials, workers, [&](std::size_t job) {
        const std::size_t i = job / trials;
        const std::size_t t = job % trials;
        const double rho = rho_grid[i];
        Rng rng(derive_seed(seed, i, t));
        std::bernoulli_distribution coin(0.5);
        std::vector<std::uint8_t> msg(code.k());
        for (auto& b : msg) {
            b = coin(rng);
        }
        const auto cw = code.encode(msg);
        const auto x = modulate(cw, c);
        std::vector<double> llr(code.n(), 0.0);
        if (rho > 0.0) {
            ComplexNormal noise(1.0);
            std::vector<cplx> r(symbols);
            const double s = std::sqrt(rho);
            for (std::size_t k = 0; k < symbols; ++k) {
                r[k] = x[k] + noise(rng) / s;
            }
            demap_llr(r, 1.0 / rho, c, llr);
        }
        const auto dec = bp_decode(code, llr, max_iters);
        std::vector<cplx> est(symbols);
        soft_symbols(dec.llr_post, c, est);
        double err = 0.0;
        for (std::size_t k = 0; k < symbols; ++k) {
            err += std::norm(est[k] - x[k]);
        }
        mse[job] = err / static_cast<double>(symbols);
    });
    std::vector<double> mean(points);
    std::vector<double> se(points);
    for (std::size_t i = 0; i < points; ++i) {
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            s += mse[i * trials + t];
            s2 += mse[i * trials + t] * mse[i * trials + t];
        }
        const double nt = static_cast<double>(trials);
        mean[i] = s / nt;
        se[i] = trials > 1 ? std::sqrt(std::max(0.0, s2 / nt - mean[i] * mean[i]) / (nt - 1.0)) : 0.0;
    }
    return TransferCurve(rho_grid, std::move(mean), Monotonicity::nonincreasing, std::move(se));
}

TunnelVerdict check_tunnel(const TransferCurve& curve_c, const TransferCurve& curve_s, const TransferCurve& eta_inv,
                           double rho_max, double zero_tol) {
    TunnelVerdict verdict;
    std::ostringstream note;
    if (curve_s.x() != curve_c.x()) {
        note << "demodulator curve resampled onto the decoder grid; ";
    }
    if (eta_inv.x() != curve_c.x()) {
        note << "inverse extrinsic curve resampled onto the decoder grid; ";
    }
    if (curve_c.x_max() < rho_max) {
        note << "decoder curve ends at " << curve_c.x_max() << " < rho_max, held constant beyond; ";
    }
    verdict.note = note.str();
    for (std::size_t i = 0; i < curve_c.size(); ++i) {
        const double rho = curve_c.x()[i];
        if (rho > rho_max) {
            break;
        }
        const double phi_c = curve_c.y()[i];
        if (phi_c <= zero_tol) {
            continue;
        }
        if (phi_c >= std::min(curve_s(rho), eta_inv(rho))) {
            verdict.open = false;
            verdict.closed_at = rho;
            return verdict;
        }
    }
    return verdict;
}

} // namespace mamp
