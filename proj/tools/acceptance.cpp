// Acceptance run: one PASS/FAIL line per criterion, measured values inline.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mamp/bench.hpp"
#include "mamp/channel.hpp"
#include "mamp/detect.hpp"
#include "mamp/ldpc.hpp"
#include "mamp/modem.hpp"
#include "mamp/rates.hpp"
#include "mamp/rng.hpp"
#include "mamp/se.hpp"
#include "mamp/sim.hpp"

using namespace mamp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double x, int digits = 4) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

DetectorConfig plain(int iters) {
    DetectorConfig cfg;
    cfg.max_iters = iters;
    cfg.convergence_tol = 0.0;
    return cfg;
}

// Random spectrum with extreme singular-value ratio kappa: endpoints pinned,
// interior values log-uniform in between.
SingularSpectrum random_spectrum(std::size_t m, std::size_t n, double kappa, Rng& rng) {
    const std::size_t t = std::min(m, n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> e(t);
    for (std::size_t i = 0; i < t; ++i) {
        const double frac = i == 0 ? 0.0 : (i + 1 == t ? 1.0 : u(rng));
        e[i] = std::pow(kappa, -frac);
    }
    return SingularSpectrum::normalized(m, n, e);
}

Outcome capacity_consistency() {
    const auto t0 = Clock::now();
    const auto gauss = Constellation::gaussian();
    const std::vector<double> betas{0.5, 1.0, 1.5};
    const std::vector<double> kappas{1.0, 10.0, 50.0};
    Rng rng(derive_seed(2024, 1));
    std::uniform_real_distribution<double> snr_db(0.0, 20.0);
    const std::size_t n = 256;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double beta = betas[i % 3];
        const double kappa = kappas[(i / 3) % 3];
        const auto m = static_cast<std::size_t>(std::lround(static_cast<double>(n) / beta));
        const auto sp = random_spectrum(m, n, kappa, rng);
        const VseModel model(sp, db_to_linear(snr_db(rng)));
        const double cap = capacity_gaussian(sp, model.snr());
        worst = std::max(worst, std::abs(max_rate(model, gauss).rate_bits - cap) / cap);
    }
    const double secs = seconds_since(t0);
    return {worst <= 0.005 && secs < 60.0,
            "worst relative error " + num(worst, 3) + " over 20 spectra, " + num(secs, 3) + " s"};
}

Outcome flat_spectrum() {
    double worst_eta = 0.0;
    for (std::size_t m : {256, 512}) {
        const SingularSpectrum sp = SingularSpectrum::normalized(m, 256, std::vector<double>(256, 1.0));
        for (double snr : {0.5, 10.0, 1000.0}) {
            const VseModel model(sp, snr);
            for (double v : log_grid(1e-6 * model.gamma_hat_limit(), (1.0 - 1e-9) * model.gamma_hat_limit(), 200)) {
                worst_eta = std::max(worst_eta, std::abs(eta_se(v, model) - snr) / snr);
            }
        }
    }
    const auto qpsk = Constellation::qpsk();
    const double snr = db_to_linear(10.0);
    const VseModel model(SingularSpectrum(256, 256, std::vector<double>(256, 1.0)), snr);
    const double rate = max_rate(model, qpsk).rate_bits;
    const double mi = mutual_information_bits(snr, qpsk);
    const double diff = std::abs(rate - mi);
    return {worst_eta <= 1e-9 && diff <= 1e-3, "max |eta - snr|/snr " + num(worst_eta, 3) + ", QPSK rate " +
                                                   num(rate, 7) + " vs MI " + num(mi, 7) + " bits"};
}

Outcome fixed_point() {
    const auto t0 = Clock::now();
    ExperimentConfig cfg;
    cfg.system.n = 512;
    cfg.system.beta = 1.5;
    cfg.channel.kappa = 10.0;
    cfg.channel.redraw = true;
    cfg.snr_db_grid = {10.0};
    cfg.detector.cfg.max_iters = 40;
    cfg.detector.cfg.convergence_tol = 0.0;
    cfg.run.trials = 20;
    const auto res = run_se_validation(cfg);
    const double secs = seconds_since(t0);
    double mse_m = 0.0;
    double mse_o = 0.0;
    double v_star = 0.0;
    double worst_gap = 0.0;
    for (const auto& r : res.summary) {
        (r.detector_name == "mamp" ? mse_m : mse_o) = r.mse;
        v_star = r.vse_v_star;
        worst_gap = std::max(worst_gap, r.rel_gap);
    }
    const double mutual = std::abs(mse_m - mse_o) / std::max(mse_m, mse_o);
    return {worst_gap <= 0.1 && mutual <= 0.1 && secs < 300.0,
            "mamp " + num(mse_m) + ", oamp " + num(mse_o) + ", v* " + num(v_star) + ", worst gap to v* " +
                num(worst_gap, 3) + ", mutual " + num(mutual, 3) + ", " + num(secs, 3) + " s"};
}

double excess_kurtosis(const std::vector<double>& v) {
    double m = 0.0;
    for (double s : v) {
        m += s;
    }
    m /= static_cast<double>(v.size());
    double m2 = 0.0;
    double m4 = 0.0;
    for (double s : v) {
        const double d = (s - m) * (s - m);
        m2 += d;
        m4 += d * d;
    }
    m2 /= static_cast<double>(v.size());
    m4 /= static_cast<double>(v.size());
    return m4 / (m2 * m2) - 3.0;
}

Outcome orthogonality() {
    const std::size_t n = 512;
    const std::size_t m = 341;
    const int iters = 20;
    const double bound = 5.0 / std::sqrt(static_cast<double>(n));
    const auto qpsk = Constellation::qpsk();
    const double sigma2 = 0.1;
    // [detector][iteration] -> samples standardized per seed, pooled over seeds
    std::vector<std::vector<std::vector<double>>> pooled(2, std::vector<std::vector<double>>(iters));
    double worst_corr = 0.0;
    for (int s = 0; s < 10; ++s) {
        const auto a = gen_ill_conditioned(m, n, 10.0, derive_seed(77, s));
        Rng rng(derive_seed(78, s));
        const auto f = random_frame(a, qpsk, 1, sigma2, rng);
        ConstellationDenoiser d(qpsk);
        const DetectionResult res[2] = {run_mamp(f.y, a, sigma2, d, plain(iters), &f.x),
                                        run_oamp_vamp(f.y, a, sigma2, d, plain(iters), &f.x)};
        for (int k = 0; k < 2; ++k) {
            for (const auto& rec : res[k].trace.records) {
                worst_corr = std::max(worst_corr, rec.corr_f);
            }
            const auto& g = res[k].trace.g_samples;
            for (int t = 0; t < iters; ++t) {
                const auto first = g.begin() + 2 * t * static_cast<long>(n);
                double sd = 0.0;
                for (auto it = first; it != first + 2 * static_cast<long>(n); ++it) {
                    sd += *it * *it;
                }
                sd = std::sqrt(sd / (2.0 * static_cast<double>(n)));
                for (auto it = first; it != first + 2 * static_cast<long>(n); ++it) {
                    pooled[k][t].push_back(*it / sd);
                }
            }
        }
    }
    double worst_kurt = 0.0;
    for (const auto& det : pooled) {
        for (const auto& samples : det) {
            worst_kurt = std::max(worst_kurt, std::abs(excess_kurtosis(samples)));
        }
    }
    return {worst_corr <= bound && worst_kurt <= 0.15, "max |<f,g>|/N " + num(worst_corr, 3) + " (bound " +
                                                           num(bound, 3) + "), max |excess kurtosis| " +
                                                           num(worst_kurt, 3)};
}

ExperimentConfig coded_config() {
    ExperimentConfig cfg;
    cfg.system.n = 256;
    cfg.system.beta = 1.5;
    cfg.channel.kappa = 10.0;
    cfg.detector.names = {"mamp"};
    cfg.detector.cfg.max_iters = 80;
    cfg.detector.cfg.bp_iters = 10;
    cfg.run.trials = 32;
    cfg.run.max_frame_errors = 8;
    return cfg;
}

LdpcCode regular36() { return construct_code(DegreeDistribution::regular(3, 6), 10000, 1); }

// Decoder MSE below this counts as zero: BP stops at the first valid
// syndrome, which leaves a soft residual near 1e-5 with no bit errors.
constexpr double kDecodedMse = 1e-4;

Outcome tunnel_vs_simulation() {
    const auto qpsk = Constellation::qpsk();
    const LdpcCode code = regular36();
    auto cfg = coded_config();
    cfg.run.trials = 24;
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) {
        grid.push_back(4.8 + 0.3 * i);
    }
    const double rho_top = db_to_linear(grid.back());
    const auto rho_grid = linear_grid(0.0, rho_top, 121);
    const TransferCurve curve_c = measure_decoder_transfer(code, qpsk, rho_grid, 16, 99, 200);
    const TransferCurve curve_s = mmse_curve(qpsk, rho_grid);
    const SingularSpectrum sp = ill_conditioned_spectrum(cfg.m(), cfg.system.n, cfg.channel.kappa);

    std::vector<int> open;
    std::vector<int> clean; // 1 error-free, 0 failing, -1 in between
    std::string trail;
    for (double snr_db : grid) {
        const VseModel model(sp, db_to_linear(snr_db));
        // The iteration starts at the LMMSE output for unit prior variance
        // and never visits lower SINRs, where the measured decoder and
        // demapper curves coincide up to sampling noise.
        const double rho_1 = model.extrinsic_sinr(1.0);
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < rho_grid.size(); ++i) {
            if (rho_grid[i] >= rho_1) {
                x.push_back(rho_grid[i]);
                y.push_back(curve_c.y()[i]);
            }
        }
        const TransferCurve visited(x, y, curve_c.direction());
        const TransferCurve eta_inv = eta_inv_curve(model, linear_grid(1e-6, model.snr(), 241));
        open.push_back(check_tunnel(visited, curve_s, eta_inv, model.snr(), kDecodedMse).open ? 1 : 0);
        cfg.snr_db_grid = {snr_db};
        const double ber = run_ber(cfg, code).front().ber;
        clean.push_back(ber < 1e-5 ? 1 : (ber > 1e-2 ? 0 : -1));
        trail += " " + num(snr_db, 3) + ":" + (open.back() ? "open" : "closed") + "/" + num(ber, 2);
    }
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (clean[i] != open[i]) {
            bad.push_back(i);
        }
    }
    bool pass = bad.size() <= 1;
    if (bad.size() == 1) {
        // must sit next to a change of verdict
        const std::size_t i = bad.front();
        const bool edge = (i > 0 && open[i - 1] != open[i]) || (i + 1 < grid.size() && open[i + 1] != open[i]);
        pass = edge;
    }
    return {pass, std::to_string(bad.size()) + " mismatches; tunnel/BER" + trail};
}

Outcome rate_ordering() {
    const std::size_t n = 256;
    const SingularSpectrum sp = ill_conditioned_spectrum(static_cast<std::size_t>(std::lround(n / 1.5)), n, 50.0);
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) {
        grid.push_back(i);
    }
    bool ordered = true;
    std::vector<RateRow> qpsk;
    std::vector<RateRow> qam16;
    for (const auto& c : {Constellation::qpsk(), Constellation::qam16(), Constellation::gaussian()}) {
        const auto rows = rate_table(sp, c, grid);
        for (const auto& r : rows) {
            ordered = ordered && r.rate_cas <= r.rate_mamp + 1e-9;
        }
        if (c.name() == "qpsk") {
            qpsk = rows;
        } else if (c.name() == "qam16") {
            qam16 = rows;
        }
    }
    double dip_at = NAN;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (qam16[i].rate_cas < qpsk[i].rate_cas) {
            dip_at = grid[i];
            break;
        }
    }
    return {ordered && !std::isnan(dip_at), std::string("CAS <= MAMP ") + (ordered ? "everywhere" : "violated") +
                                                ", first SNR with CAS(16QAM) < CAS(QPSK): " +
                                                (std::isnan(dip_at) ? "none" : num(dip_at) + " dB")};
}

// SNR where the BER curve crosses `target`, interpolating log BER linearly
// between grid points; zero counts get half an error. NaN when the curve
// never stays below the target up to the end of the grid.
double snr_at_ber(const std::vector<BerRecord>& rows, double target) {
    auto lb = [](const BerRecord& r) {
        return std::log10(r.bit_errors > 0 ? r.ber : 0.5 / static_cast<double>(r.bits));
    };
    std::size_t first_ok = rows.size();
    for (std::size_t i = rows.size(); i-- > 0;) {
        if (lb(rows[i]) > std::log10(target)) {
            break;
        }
        first_ok = i;
    }
    if (first_ok == rows.size() || first_ok == 0) {
        return first_ok == 0 ? rows.front().snr_db : NAN;
    }
    const double y0 = lb(rows[first_ok - 1]);
    const double y1 = lb(rows[first_ok]);
    const double x0 = rows[first_ok - 1].snr_db;
    const double x1 = rows[first_ok].snr_db;
    return x0 + (std::log10(target) - y0) * (x1 - x0) / (y1 - y0);
}

std::vector<double> grid_db(double lo, double step, int points) {
    std::vector<double> g;
    for (int i = 0; i < points; ++i) {
        g.push_back(lo + step * i);
    }
    return g;
}

Outcome code_design_gain() {
    const auto qpsk = Constellation::qpsk();
    auto cfg = coded_config();
    cfg.code.design_snr_db = 5.0;
    cfg.snr_db_grid = {cfg.code.design_snr_db};
    const DegreeDistribution dd = design_code(cfg);
    const LdpcCode opt = construct_code(dd, 10000, 1);
    const LdpcCode reg = regular36();

    cfg.snr_db_grid = grid_db(4.4, 0.2, 11);
    cfg.detector.names = {"mamp", "oamp"};
    const auto rows_opt = run_ber(cfg, opt);
    cfg.snr_db_grid = grid_db(5.6, 0.2, 9);
    cfg.detector.names = {"mamp"};
    const auto rows_reg = run_ber(cfg, reg);

    std::vector<BerRecord> opt_m;
    std::vector<BerRecord> opt_o;
    for (const auto& r : rows_opt) {
        (r.detector_name == "mamp" ? opt_m : opt_o).push_back(r);
    }
    const double t_opt = snr_at_ber(opt_m, 1e-4);
    const double t_oamp = snr_at_ber(opt_o, 1e-4);
    const double t_reg = snr_at_ber(rows_reg, 1e-4);
    const double gain = t_reg - t_opt;
    const double agree = std::abs(t_opt - t_oamp);

    const SingularSpectrum sp = ill_conditioned_spectrum(cfg.m(), cfg.system.n, cfg.channel.kappa);
    const double limit_opt = snr_limit_for_rate(qpsk, sp, 2.0 * opt.rate(), 0.0, 20.0);
    const double limit_reg = snr_limit_for_rate(qpsk, sp, 2.0 * reg.rate(), 0.0, 20.0);
    return {gain >= 0.5 && agree <= 0.3,
            "BER 1e-4 at: optimized mamp " + num(t_opt) + " dB, oamp " + num(t_oamp) + " dB, (3,6) mamp " +
                num(t_reg) + " dB; gain " + num(gain, 3) + " dB, detector gap " + num(agree, 3) +
                " dB; distance to the rate limit: optimized " + num(t_opt - limit_opt, 3) + " dB (rate " +
                num(opt.rate()) + "), (3,6) " + num(t_reg - limit_reg, 3) + " dB"};
}

Outcome runtime_trend() {
    ExperimentConfig cfg;
    cfg.system.beta = 1.5;
    cfg.channel.kappa = 10.0;
    cfg.snr_db_grid = {15.0};
    cfg.detector.cfg.max_iters = 100;
    cfg.detector.cfg.convergence_tol = 0.0;
    cfg.run.trials = 3;
    cfg.bench_sizes = {256, 512, 1024};
    cfg.bench_target_mse = 1e-3;
    const auto rows = run_runtime_bench(cfg);
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        pass = pass && r.mamp_reached == 1.0 && r.oamp_reached == 1.0;
        if (i > 0) {
            pass = pass && r.ratio < rows[i - 1].ratio;
        }
        detail += (i ? ", N=" : "ratio N=") + std::to_string(r.n) + " " + num(r.ratio, 3) + " (" +
                  num(r.mamp_iters, 3) + "/" + num(r.oamp_iters, 3) + " iters)";
    }
    pass = pass && !rows.empty() && rows.back().ratio <= 0.5;
    return {pass, detail};
}

Outcome oracles() {
    const auto a = gen_ill_conditioned(48, 64, 5.0, 7);
    const auto gauss = Constellation::gaussian();
    const double sigma2 = 0.05;
    Rng rng(4);
    const auto f = random_frame(a, gauss, 1, sigma2, rng);
    const CMatrix& A = a.dense();
    Eigen::MatrixXcd k = A.adjoint() * A;
    k.diagonal().array() += sigma2;
    const CMatrix direct = k.ldlt().solve(A.adjoint() * f.y);
    ConstellationDenoiser d(gauss);
    const auto o = run_oamp_vamp(f.y, a, sigma2, d, plain(4));
    const double solve_err = (o.x_hat - direct).norm() / direct.norm();

    double worst_z = 0.0;
    ComplexNormal noise(1.0);
    for (const auto& c : {Constellation::bpsk(), Constellation::qpsk()}) {
        for (double rho : {0.3, 1.0, 3.0}) {
            Rng r(derive_seed(5, static_cast<std::uint64_t>(rho * 10), c.points().size()));
            std::uniform_int_distribution<std::size_t> pick(0, c.points().size() - 1);
            const double s = std::sqrt(rho);
            const std::size_t samples = 1000000;
            double sum = 0.0;
            double sum2 = 0.0;
            for (std::size_t i = 0; i < samples; ++i) {
                const cplx x = c.points()[pick(r)];
                const double e = std::norm(posterior(s * x + noise(r), rho, c).mean - x);
                sum += e;
                sum2 += e * e;
            }
            const double mean = sum / samples;
            const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
            worst_z = std::max(worst_z, std::abs(mean - mmse_exact(rho, c)) / se);
        }
    }
    return {solve_err <= 1e-8 && worst_z <= 3.0, "OAMP vs direct solve " + num(solve_err, 3) +
                                                     ", worst quadrature vs Monte Carlo " + num(worst_z, 3) +
                                                     " standard errors"};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    std::vector<int> allow;
    app.add_option("--only", only, "run these criteria (default all)")->delimiter(',');
    app.add_option("--allow-fail", allow, "report these criteria without failing the run")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Gaussian max rate equals log-det capacity", capacity_consistency},
        {"flat spectrum closed forms", flat_spectrum},
        {"genie detectors reach the state evolution fixed point", fixed_point},
        {"orthogonality and Gaussianity", orthogonality},
        {"open tunnel iff error-free decoding", tunnel_vs_simulation},
        {"rate ordering", rate_ordering},
        {"code design gain", code_design_gain},
        {"runtime trend", runtime_trend},
        {"oracle equivalence", oracles},
    };
    const std::set<int> pick(only.begin(), only.end());
    const std::set<int> allowed(allow.begin(), allow.end());
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!pick.empty() && !pick.count(id)) {
            continue;
        }
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        const bool excused = !out.pass && allowed.count(id);
        std::cout << (out.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": " << out.detail
                  << (excused ? " [known, not counted]" : "") << std::endl;
        if (!out.pass && !excused) {
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}
