#include "mamp/bench.hpp"

#include <json.hpp>

#include <boost/version.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>

#include "mamp/parallel.hpp"
#include "mamp/rng.hpp"
#include "mamp/se.hpp"
#include "mamp/sim.hpp"

#ifndef MAMP_VERSION
#define MAMP_VERSION "unknown"
#endif

namespace mamp {

namespace fs = std::filesystem;

ConfigError::ConfigError(const std::string& src, const std::string& key, const std::string& message)
    : std::runtime_error(src + ": " + key + ": " + message), source(src), field(key) {}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& src, const std::string& key) {
    const std::string s = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError(src, key, "cannot parse '" + s + "' as a number");
    }
    return value;
}

bool parse_bool(const std::string& text, const std::string& src, const std::string& key) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        return false;
    }
    throw ConfigError(src, key, "expected true or false, got '" + s + "'");
}

// "a, b, c" or "lo:step:hi" (inclusive).
std::vector<double> parse_grid(const std::string& text, const std::string& src, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.push_back(parse_number<double>(item, src, key));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos) {
            throw ConfigError(src, key, "range must be lo:step:hi");
        }
        const double lo = parse_number<double>(item.substr(0, c1), src, key);
        const double step = parse_number<double>(item.substr(c1 + 1, c2 - c1 - 1), src, key);
        const double hi = parse_number<double>(item.substr(c2 + 1), src, key);
        if (!(step > 0.0) || hi < lo) {
            throw ConfigError(src, key, "range needs step > 0 and hi >= lo");
        }
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(lo + static_cast<double>(i) * step);
        }
    }
    return out;
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            out += ",";
        }
        if constexpr (std::is_same_v<T, std::string>) {
            out += v[i];
        } else {
            out += fmt(static_cast<double>(v[i]));
        }
    }
    return out;
}

std::string resolve(const std::string& path, const fs::path& base) {
    if (path.empty() || fs::path(path).is_absolute() || base.empty()) {
        return path;
    }
    return (base / path).lexically_normal().string();
}

struct Field {
    std::function<void(ExperimentConfig&, const std::string&, const std::string&, const fs::path&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

const char* theta_name(ThetaMode m) {
    switch (m) {
    case ThetaMode::adaptive: return "adaptive";
    case ThetaMode::spectral: return "spectral";
    case ThetaMode::schedule: return "schedule";
    }
    return "?";
}

const std::map<std::string, Field>& fields() {
    using C = ExperimentConfig;
    using S = const std::string&;
    using P = const fs::path&;
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        auto sz = [&](const std::string& key, auto member) {
            t[key] = {[key, member](C& c, S v, S src, P) { member(c) = parse_number<std::size_t>(v, src, key); },
                      [member](const C& c) { return std::to_string(member(const_cast<C&>(c))); }};
        };
        auto u64 = [&](const std::string& key, auto member) {
            t[key] = {[key, member](C& c, S v, S src, P) { member(c) = parse_number<std::uint64_t>(v, src, key); },
                      [member](const C& c) { return std::to_string(member(const_cast<C&>(c))); }};
        };
        auto i32 = [&](const std::string& key, auto member) {
            t[key] = {[key, member](C& c, S v, S src, P) { member(c) = parse_number<int>(v, src, key); },
                      [member](const C& c) { return std::to_string(member(const_cast<C&>(c))); }};
        };
        auto dbl = [&](const std::string& key, auto member) {
            t[key] = {[key, member](C& c, S v, S src, P) { member(c) = parse_number<double>(v, src, key); },
                      [member](const C& c) { return fmt(member(const_cast<C&>(c))); }};
        };
        auto flag = [&](const std::string& key, auto member) {
            t[key] = {[key, member](C& c, S v, S src, P) { member(c) = parse_bool(v, src, key); },
                      [member](const C& c) { return std::string(member(const_cast<C&>(c)) ? "true" : "false"); }};
        };
        auto str = [&](const std::string& key, auto member) {
            t[key] = {[member](C& c, S v, S, P) { member(c) = trim(v); },
                      [member](const C& c) { return member(const_cast<C&>(c)); }};
        };
        auto file = [&](const std::string& key, auto member) {
            t[key] = {[member](C& c, S v, S, P base) { member(c) = resolve(trim(v), base); },
                      [member](const C& c) { return member(const_cast<C&>(c)); }};
        };

        sz("system.m", [](C& c) -> auto& { return c.system.m; });
        sz("system.n", [](C& c) -> auto& { return c.system.n; });
        dbl("system.beta", [](C& c) -> auto& { return c.system.beta; });
        str("channel.kind", [](C& c) -> auto& { return c.channel.kind; });
        dbl("channel.kappa", [](C& c) -> auto& { return c.channel.kappa; });
        u64("channel.seed", [](C& c) -> auto& { return c.channel.seed; });
        flag("channel.redraw", [](C& c) -> auto& { return c.channel.redraw; });
        t["snr_db_grid"] = {[](C& c, S v, S src, P) { c.snr_db_grid = parse_grid(v, src, "snr_db_grid"); },
                            [](const C& c) { return join(c.snr_db_grid); }};
        t["detector.name"] = {[](C& c, S v, S, P) { c.detector.names = split_list(v); },
                              [](const C& c) { return join(c.detector.names); }};
        str("detector.constellation", [](C& c) -> auto& { return c.detector.constellation; });
        i32("detector.max_iters", [](C& c) -> auto& { return c.detector.cfg.max_iters; });
        sz("detector.damping_window", [](C& c) -> auto& { return c.detector.cfg.damping_window; });
        t["detector.theta_mode"] = {
            [](C& c, S v, S src, P) {
                const auto s = trim(v);
                if (s == "adaptive") {
                    c.detector.cfg.theta_mode = ThetaMode::adaptive;
                } else if (s == "spectral") {
                    c.detector.cfg.theta_mode = ThetaMode::spectral;
                } else if (s == "schedule") {
                    c.detector.cfg.theta_mode = ThetaMode::schedule;
                } else {
                    throw ConfigError(src, "detector.theta_mode", "expected adaptive, spectral or schedule");
                }
            },
            [](const C& c) { return std::string(theta_name(c.detector.cfg.theta_mode)); }};
        t["detector.theta_schedule"] = {
            [](C& c, S v, S src, P) { c.detector.cfg.theta_schedule = parse_grid(v, src, "detector.theta_schedule"); },
            [](const C& c) { return join(c.detector.cfg.theta_schedule); }};
        t["detector.xi_mode"] = {
            [](C& c, S v, S src, P) {
                const auto s = trim(v);
                if (s == "fixed_one") {
                    c.detector.cfg.xi_mode = XiMode::fixed_one;
                } else if (s == "variance_min") {
                    c.detector.cfg.xi_mode = XiMode::variance_min;
                } else {
                    throw ConfigError(src, "detector.xi_mode", "expected fixed_one or variance_min");
                }
            },
            [](const C& c) {
                return std::string(c.detector.cfg.xi_mode == XiMode::fixed_one ? "fixed_one" : "variance_min");
            }};
        dbl("detector.convergence_tol", [](C& c) -> auto& { return c.detector.cfg.convergence_tol; });
        i32("detector.bp_iters", [](C& c) -> auto& { return c.detector.cfg.bp_iters; });
        flag("detector.unrolled_memory", [](C& c) -> auto& { return c.detector.cfg.unrolled_memory; });
        flag("detector.genie_variances", [](C& c) -> auto& { return c.detector.cfg.genie_variances; });
        dbl("detector.stop_mse", [](C& c) -> auto& { return c.detector.cfg.stop_mse; });
        flag("detector.stop_when_settled", [](C& c) -> auto& { return c.detector.cfg.stop_when_settled; });
        file("code.alist", [](C& c) -> auto& { return c.code.alist; });
        file("code.dd", [](C& c) -> auto& { return c.code.dd; });
        sz("code.length", [](C& c) -> auto& { return c.code.length; });
        u64("code.seed", [](C& c) -> auto& { return c.code.seed; });
        i32("code.check_degree", [](C& c) -> auto& { return c.code.check_degree; });
        i32("code.dv_max", [](C& c) -> auto& { return c.code.dv_max; });
        dbl("code.margin", [](C& c) -> auto& { return c.code.margin; });
        dbl("code.design_snr_db", [](C& c) -> auto& { return c.code.design_snr_db; });
        sz("run.trials", [](C& c) -> auto& { return c.run.trials; });
        u64("run.master_seed", [](C& c) -> auto& { return c.run.master_seed; });
        t["run.workers"] = {[](C& c, S v, S src, P) { c.run.workers = parse_number<unsigned>(v, src, "run.workers"); },
                            [](const C& c) { return std::to_string(c.run.workers); }};
        sz("run.max_frame_errors", [](C& c) -> auto& { return c.run.max_frame_errors; });
        str("output.dir", [](C& c) -> auto& { return c.output.dir; });
        str("output.format", [](C& c) -> auto& { return c.output.format; });
        t["rate.constellations"] = {[](C& c, S v, S, P) { c.constellations = split_list(v); },
                                    [](const C& c) { return join(c.constellations); }};
        t["bench.sizes"] = {[](C& c, S v, S src, P) {
                                c.bench_sizes.clear();
                                for (const auto& s : split_list(v)) {
                                    c.bench_sizes.push_back(parse_number<std::size_t>(s, src, "bench.sizes"));
                                }
                            },
                            [](const C& c) { return join(c.bench_sizes); }};
        dbl("bench.target_mse", [](C& c) -> auto& { return c.bench_target_mse; });
        return t;
    }();
    return table;
}

void require(bool ok, const ExperimentConfig& cfg, const std::string& key, const std::string& message) {
    if (!ok) {
        throw ConfigError(cfg.source, key, message);
    }
}

} // namespace

std::size_t ExperimentConfig::m() const {
    return m_for(system.n);
}

std::size_t ExperimentConfig::m_for(std::size_t n) const {
    if (n == system.n && system.m > 0) {
        return system.m;
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(n) / system.beta)));
}

std::string ExperimentConfig::canonical() const {
    std::string out;
    for (const auto& [key, f] : fields()) {
        out += key + " = " + f.get(*this) + "\n";
    }
    return out;
}

std::uint64_t ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : canonical()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                      const fs::path& base_dir) {
    const auto it = fields().find(trim(key));
    if (it == fields().end()) {
        throw ConfigError(cfg.source, trim(key), "unknown key");
    }
    it->second.set(cfg, value, cfg.source, base_dir);
    cfg.entries[it->first] = trim(value);
}

ExperimentConfig parse_config(std::istream& is, const std::string& source, const fs::path& base_dir) {
    ExperimentConfig cfg;
    cfg.source = source;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source, "line " + std::to_string(lineno), "expected key = value");
        }
        set_config_value(cfg, line.substr(0, eq), line.substr(eq + 1), base_dir);
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path, "file", "cannot open");
    }
    return parse_config(in, path, fs::path(path).parent_path());
}

void validate(const ExperimentConfig& cfg) {
    require(cfg.system.n >= 1, cfg, "system.n", "must be >= 1");
    require(cfg.system.beta > 0.0, cfg, "system.beta", "must be > 0");
    const auto& kind = cfg.channel.kind;
    require(kind == "ill_conditioned" || kind == "iid" || kind == "unitary", cfg, "channel.kind",
            "expected ill_conditioned, iid or unitary");
    require(cfg.channel.kappa >= 1.0, cfg, "channel.kappa", "must be >= 1");
    require(kind != "unitary" || cfg.m() >= cfg.system.n, cfg, "channel.kind", "a unitary channel needs m >= n");
    require(!cfg.snr_db_grid.empty(), cfg, "snr_db_grid", "grid is empty");
    require(!cfg.detector.names.empty(), cfg, "detector.name", "no detector given");
    for (const auto& d : cfg.detector.names) {
        require(d == "mamp" || d == "oamp" || d == "cas", cfg, "detector.name",
                "unknown detector '" + d + "' (mamp, oamp, cas)");
    }
    try {
        (void)Constellation::by_name(cfg.detector.constellation);
        for (const auto& c : cfg.constellations) {
            (void)Constellation::by_name(c);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(cfg.source, "constellation", e.what());
    }
    require(!cfg.constellations.empty(), cfg, "rate.constellations", "list is empty");
    require(cfg.detector.cfg.max_iters >= 1, cfg, "detector.max_iters", "must be >= 1");
    require(cfg.detector.cfg.damping_window >= 1, cfg, "detector.damping_window", "must be >= 1");
    require(cfg.detector.cfg.bp_iters >= 1, cfg, "detector.bp_iters", "must be >= 1");
    require(cfg.detector.cfg.theta_mode != ThetaMode::schedule || !cfg.detector.cfg.theta_schedule.empty(), cfg,
            "detector.theta_schedule", "schedule mode needs a nonempty schedule");
    require(cfg.run.trials >= 1, cfg, "run.trials", "must be >= 1");
    require(cfg.run.workers >= 1, cfg, "run.workers", "must be >= 1");
    require(cfg.run.max_frame_errors >= 1, cfg, "run.max_frame_errors", "must be >= 1");
    require(cfg.output.format == "csv" || cfg.output.format == "json", cfg, "output.format", "expected csv or json");
    require(!cfg.bench_sizes.empty(), cfg, "bench.sizes", "list is empty");
    for (const auto n : cfg.bench_sizes) {
        require(n >= 1, cfg, "bench.sizes", "sizes must be >= 1");
    }
    require(cfg.bench_target_mse > 0.0, cfg, "bench.target_mse", "must be > 0");
    require(cfg.code.alist.empty() || fs::exists(cfg.code.alist), cfg, "code.alist",
            "file not found: " + cfg.code.alist);
    require(cfg.code.dd.empty() || fs::exists(cfg.code.dd), cfg, "code.dd", "file not found: " + cfg.code.dd);
    require(cfg.code.dd.empty() || cfg.code.length > 0, cfg, "code.length", "a degree distribution needs a length");
}

ChannelMatrix make_channel(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed) {
    const std::size_t m = cfg.m_for(n);
    if (cfg.channel.kind == "iid") {
        return gen_iid_gaussian(m, n, seed);
    }
    const double kappa = cfg.channel.kind == "unitary" ? 1.0 : cfg.channel.kappa;
    return gen_ill_conditioned(m, n, kappa, seed);
}

SingularSpectrum config_spectrum(const ExperimentConfig& cfg) {
    if (cfg.channel.kind == "iid") {
        return make_channel(cfg, cfg.system.n, cfg.channel.seed).spectrum();
    }
    const double kappa = cfg.channel.kind == "unitary" ? 1.0 : cfg.channel.kappa;
    return ill_conditioned_spectrum(cfg.m(), cfg.system.n, kappa);
}

LdpcCode config_code(const ExperimentConfig& cfg) {
    if (!cfg.code.alist.empty()) {
        return load_alist(cfg.code.alist);
    }
    if (!cfg.code.dd.empty()) {
        auto code = construct_code(DegreeDistribution::load(cfg.code.dd), cfg.code.length, cfg.code.seed);
        code.set_name(fs::path(cfg.code.dd).stem().string());
        return code;
    }
    throw ConfigError(cfg.source, "code.alist", "no code given (set code.alist or code.dd)");
}

// BER ------------------------------------------------------------------------

namespace {

constexpr std::size_t kTrialBlock = 16;

struct TrialOutcome {
    std::size_t bit_errors = 0;
    int iterations = 0;
    double runtime_ms = 0.0;
};

double ms_between(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

} // namespace

std::vector<BerRecord> run_ber(const ExperimentConfig& cfg) {
    return run_ber(cfg, config_code(cfg));
}

std::vector<BerRecord> run_ber(const ExperimentConfig& cfg, const LdpcCode& code) {
    validate(cfg);
    const Constellation c = Constellation::by_name(cfg.detector.constellation);
    if (!c.is_discrete()) {
        throw ConfigError(cfg.source, "detector.constellation", "BER needs a discrete constellation");
    }
    const auto bps = static_cast<std::size_t>(c.bits_per_symbol());
    if (code.n() % bps != 0) {
        throw ConfigError(cfg.source, "code", "code length is not a multiple of the bits per symbol");
    }
    const std::size_t n = cfg.system.n;
    const std::size_t slots = (code.n() / bps + n - 1) / n;
    const std::size_t tail_bits = slots * n * bps - code.n();
    const auto& info = code.info_positions();

    const ChannelMatrix fixed = make_channel(cfg, n, cfg.channel.seed);

    std::vector<BerRecord> out;
    for (const auto& det : cfg.detector.names) {
        for (const double snr_db : cfg.snr_db_grid) {
            const double sigma2 = 1.0 / db_to_linear(snr_db);
            auto trial = [&](std::size_t i) {
                Rng rng(derive_seed(cfg.run.master_seed, i));
                std::bernoulli_distribution coin(0.5);
                std::vector<std::uint8_t> message(code.k());
                for (auto& b : message) {
                    b = coin(rng) ? 1 : 0;
                }
                std::vector<std::uint8_t> bits = code.encode(message);
                for (std::size_t j = 0; j < tail_bits; ++j) {
                    bits.push_back(coin(rng) ? 1 : 0);
                }
                std::optional<ChannelMatrix> own;
                if (cfg.channel.redraw) {
                    own.emplace(make_channel(cfg, n, derive_seed(cfg.channel.seed, i)));
                }
                const ChannelMatrix& a = own ? *own : fixed;
                const Frame f = transmit(a, c, bits, slots, sigma2, rng);

                TrialOutcome o;
                const auto t0 = std::chrono::steady_clock::now();
                std::vector<std::uint8_t> decoded;
                if (det == "cas") {
                    auto res = run_cas_mamp(f.y, a, sigma2, c, code, 1, cfg.detector.cfg);
                    decoded = std::move(res.bits);
                    o.iterations = res.detection.iterations;
                } else {
                    CodedDenoiser nld(code, c, 1, cfg.detector.cfg.bp_iters);
                    const auto res = det == "mamp" ? run_mamp(f.y, a, sigma2, nld, cfg.detector.cfg)
                                                   : run_oamp_vamp(f.y, a, sigma2, nld, cfg.detector.cfg);
                    decoded = nld.decoded_bits();
                    o.iterations = res.iterations;
                }
                o.runtime_ms = ms_between(t0, std::chrono::steady_clock::now());
                for (const auto p : info) {
                    o.bit_errors += decoded[p] != bits[p] ? 1 : 0;
                }
                return o;
            };

            BerRecord rec;
            rec.snr_db = snr_db;
            rec.detector_name = det;
            rec.code_name = code.name();
            std::size_t frame_errors = 0;
            double iters = 0.0;
            double runtime = 0.0;
            bool done = false;
            for (std::size_t start = 0; start < cfg.run.trials && !done; start += kTrialBlock) {
                const std::size_t count = std::min(kTrialBlock, cfg.run.trials - start);
                std::vector<TrialOutcome> block(count);
                parallel_for(count, cfg.run.workers, [&](std::size_t j) { block[j] = trial(start + j); });
                for (const auto& o : block) {
                    ++rec.trials;
                    rec.bit_errors += o.bit_errors;
                    frame_errors += o.bit_errors > 0 ? 1 : 0;
                    iters += o.iterations;
                    runtime += o.runtime_ms;
                    if (frame_errors >= cfg.run.max_frame_errors) {
                        done = true;
                        break;
                    }
                }
            }
            rec.bits = rec.trials * info.size();
            rec.ber = rec.bits ? static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits) : 0.0;
            rec.fer = static_cast<double>(frame_errors) / static_cast<double>(rec.trials);
            rec.mean_iters = iters / static_cast<double>(rec.trials);
            rec.mean_runtime_ms = runtime / static_cast<double>(rec.trials);
            out.push_back(rec);
        }
    }
    return out;
}

// Rates ----------------------------------------------------------------------

std::map<std::string, std::vector<RateRow>> run_rate_figure(const ExperimentConfig& cfg) {
    validate(cfg);
    const SingularSpectrum spectrum = config_spectrum(cfg);
    std::map<std::string, std::vector<RateRow>> out;
    for (const auto& name : cfg.constellations) {
        out[name] = rate_table(spectrum, Constellation::by_name(name), cfg.snr_db_grid, cfg.run.workers);
    }
    return out;
}

// State evolution check --------------------------------------------------------

SeValidation run_se_validation(const ExperimentConfig& cfg) {
    validate(cfg);
    const Constellation c = Constellation::by_name(cfg.detector.constellation);
    const std::size_t n = cfg.system.n;
    const ChannelMatrix fixed = make_channel(cfg, n, cfg.channel.seed);
    const auto phi = [&](double rho) { return mmse_exact(rho, c); };
    const int iters = cfg.detector.cfg.max_iters;
    const std::size_t trials = cfg.run.trials;

    SeValidation out;
    for (const double snr_db : cfg.snr_db_grid) {
        const double snr = db_to_linear(snr_db);
        const double sigma2 = 1.0 / snr;
        const VseModel model(config_spectrum(cfg), snr);
        const FixedPoint fp = vse_fixed_point(model, phi);
        const VseTrajectory traj = vse_trajectory(model, phi, iters);

        // [trial][detector] -> per-iteration (mse_r, mse_x, v_gamma), padded to `iters`.
        struct Curve {
            std::vector<double> mse_r, mse_x, v_gamma;
        };
        std::vector<std::array<Curve, 2>> curves(trials);
        parallel_for(trials, cfg.run.workers, [&](std::size_t i) {
            Rng rng(derive_seed(cfg.run.master_seed, i));
            std::optional<ChannelMatrix> own;
            if (cfg.channel.redraw) {
                own.emplace(make_channel(cfg, n, derive_seed(cfg.channel.seed, i)));
            }
            const ChannelMatrix& a = own ? *own : fixed;
            const Frame f = random_frame(a, c, 1, sigma2, rng);
            ConstellationDenoiser nld(c);
            for (int d = 0; d < 2; ++d) {
                const auto res = d == 0 ? run_mamp(f.y, a, sigma2, nld, cfg.detector.cfg, &f.x)
                                        : run_oamp_vamp(f.y, a, sigma2, nld, cfg.detector.cfg, &f.x);
                Curve& cv = curves[i][static_cast<std::size_t>(d)];
                for (int t = 0; t < iters; ++t) {
                    const auto& rec = res.trace.records[std::min<std::size_t>(
                        static_cast<std::size_t>(t), res.trace.records.size() - 1)];
                    cv.mse_r.push_back(rec.mse_r);
                    cv.mse_x.push_back(rec.mse_x);
                    cv.v_gamma.push_back(rec.v_gamma);
                }
            }
        });

        for (std::size_t d = 0; d < 2; ++d) {
            const std::string name = d == 0 ? "mamp" : "oamp";
            for (int t = 0; t < iters; ++t) {
                SeTraceRow row;
                row.snr_db = snr_db;
                row.detector_name = name;
                row.iter = t + 1;
                for (const auto& cv : curves) {
                    row.mse_r += cv[d].mse_r[static_cast<std::size_t>(t)];
                    row.mse_x += cv[d].mse_x[static_cast<std::size_t>(t)];
                    row.v_gamma += cv[d].v_gamma[static_cast<std::size_t>(t)];
                }
                row.mse_r /= static_cast<double>(trials);
                row.mse_x /= static_cast<double>(trials);
                row.v_gamma /= static_cast<double>(trials);
                const auto& steps = traj.steps;
                row.vse_v = steps.empty() ? fp.v_star
                                          : steps[std::min<std::size_t>(static_cast<std::size_t>(t), steps.size() - 1)].v;
                out.trace.push_back(row);
            }
            SeRecord rec;
            rec.snr_db = snr_db;
            rec.detector_name = name;
            rec.trials = trials;
            rec.iters = iters;
            double sum = 0.0;
            double sum2 = 0.0;
            for (const auto& cv : curves) {
                const double e = cv[d].mse_x.back();
                sum += e;
                sum2 += e * e;
            }
            const double tn = static_cast<double>(trials);
            rec.mse = sum / tn;
            rec.mse_stderr = trials > 1 ? std::sqrt(std::max(sum2 / tn - rec.mse * rec.mse, 0.0) / (tn - 1.0)) : 0.0;
            rec.vse_v_star = fp.v_star;
            rec.rel_gap = std::abs(rec.mse - fp.v_star) / fp.v_star;
            out.summary.push_back(rec);
        }
    }
    return out;
}

// Runtime --------------------------------------------------------------------

std::vector<RuntimeRecord> run_runtime_bench(const ExperimentConfig& cfg) {
    validate(cfg);
    const Constellation c = Constellation::by_name(cfg.detector.constellation);
    const double sigma2 = 1.0 / db_to_linear(cfg.snr_db_grid.front());
    DetectorConfig dc = cfg.detector.cfg;
    dc.stop_mse = cfg.bench_target_mse;

    std::vector<RuntimeRecord> out;
    for (const std::size_t n : cfg.bench_sizes) {
        const ChannelMatrix a = make_channel(cfg, n, derive_seed(cfg.channel.seed, n));
        RuntimeRecord rec;
        rec.n = n;
        rec.m = a.m();
        rec.trials = cfg.run.trials;
        rec.target_mse = cfg.bench_target_mse;
        double iter_ms[2] = {0.0, 0.0};
        double iter_count[2] = {0.0, 0.0};
        // Timed runs are serial; the first trial is repeated once untimed to warm caches.
        for (std::size_t i = 0; i <= cfg.run.trials; ++i) {
            const bool warmup = i == 0;
            Rng rng(derive_seed(cfg.run.master_seed, n, warmup ? 0 : i - 1));
            const Frame f = random_frame(a, c, 1, sigma2, rng);
            ConstellationDenoiser nld(c);
            for (int d = 0; d < 2; ++d) {
                const auto res = d == 0 ? run_mamp(f.y, a, sigma2, nld, dc, &f.x)
                                        : run_oamp_vamp(f.y, a, sigma2, nld, dc, &f.x);
                if (warmup) {
                    continue;
                }
                double stages = 0.0;
                for (const auto& r : res.trace.records) {
                    stages += r.ld_ms + r.nld_ms;
                }
                const bool reached = res.trace.records.back().mse_x <= dc.stop_mse;
                (d == 0 ? rec.mamp_ms : rec.oamp_ms) += res.setup_ms + stages;
                (d == 0 ? rec.mamp_iters : rec.oamp_iters) += res.iterations;
                (d == 0 ? rec.mamp_reached : rec.oamp_reached) += reached ? 1.0 : 0.0;
                iter_ms[d] += stages;
                iter_count[d] += res.iterations;
            }
        }
        const double tn = static_cast<double>(cfg.run.trials);
        rec.mamp_ms /= tn;
        rec.oamp_ms /= tn;
        rec.mamp_iters /= tn;
        rec.oamp_iters /= tn;
        rec.mamp_reached /= tn;
        rec.oamp_reached /= tn;
        rec.ratio = rec.mamp_ms / rec.oamp_ms;
        rec.mamp_iter_ms = iter_ms[0] / iter_count[0];
        rec.oamp_iter_ms = iter_ms[1] / iter_count[1];
        out.push_back(rec);
    }
    return out;
}

// Code design ----------------------------------------------------------------

DegreeDistribution design_code(const ExperimentConfig& cfg) {
    validate(cfg);
    const VseModel model(config_spectrum(cfg), db_to_linear(cfg.code.design_snr_db));
    const TransferCurve target = eta_inv_curve(model, linear_grid(model.snr() / 200.0, model.snr(), 200));
    return optimize_degree_distribution(target, Constellation::by_name(cfg.detector.constellation),
                                        cfg.code.check_degree, cfg.code.dv_max, cfg.code.margin);
}

// Output ---------------------------------------------------------------------

bool is_runtime_column(const std::string& name) {
    return name == "mean_runtime_ms" || name == "mamp_ms" || name == "oamp_ms" || name == "ratio" ||
           name == "mamp_iter_ms" || name == "oamp_iter_ms";
}

namespace {

void line(std::ostream& os, std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& cell : cells) {
        os << (first ? "" : ",") << cell;
        first = false;
    }
    os << "\n";
}

std::string num(std::size_t x) {
    return std::to_string(x);
}

} // namespace

void write_csv(std::ostream& os, const std::vector<BerRecord>& rows) {
    line(os, {"snr_db", "detector_name", "code_name", "trials", "bit_errors", "bits", "ber", "fer", "mean_iters",
              "mean_runtime_ms"});
    for (const auto& r : rows) {
        line(os, {fmt(r.snr_db), r.detector_name, r.code_name, num(r.trials), num(r.bit_errors), num(r.bits),
                  fmt(r.ber), fmt(r.fer), fmt(r.mean_iters), fmt(r.mean_runtime_ms)});
    }
}

void write_csv(std::ostream& os, const std::vector<RateRow>& rows) {
    line(os, {"snr_db", "rate_mamp", "rate_cas", "capacity_gaussian"});
    for (const auto& r : rows) {
        line(os, {fmt(r.snr_db), fmt(r.rate_mamp), fmt(r.rate_cas), fmt(r.capacity_gaussian)});
    }
}

void write_csv(std::ostream& os, const std::vector<SeRecord>& rows) {
    line(os, {"snr_db", "detector_name", "trials", "iters", "mse", "mse_stderr", "vse_v_star", "rel_gap"});
    for (const auto& r : rows) {
        line(os, {fmt(r.snr_db), r.detector_name, num(r.trials), std::to_string(r.iters), fmt(r.mse),
                  fmt(r.mse_stderr), fmt(r.vse_v_star), fmt(r.rel_gap)});
    }
}

void write_csv(std::ostream& os, const std::vector<SeTraceRow>& rows) {
    line(os, {"snr_db", "detector_name", "iter", "mse_r", "mse_x", "v_gamma", "vse_v"});
    for (const auto& r : rows) {
        line(os, {fmt(r.snr_db), r.detector_name, std::to_string(r.iter), fmt(r.mse_r), fmt(r.mse_x),
                  fmt(r.v_gamma), fmt(r.vse_v)});
    }
}

void write_csv(std::ostream& os, const std::vector<RuntimeRecord>& rows) {
    line(os, {"n", "m", "trials", "target_mse", "mamp_reached", "oamp_reached", "mamp_iters", "oamp_iters", "mamp_ms",
              "oamp_ms", "ratio", "mamp_iter_ms", "oamp_iter_ms"});
    for (const auto& r : rows) {
        line(os, {num(r.n), num(r.m), num(r.trials), fmt(r.target_mse), fmt(r.mamp_reached), fmt(r.oamp_reached),
                  fmt(r.mamp_iters), fmt(r.oamp_iters), fmt(r.mamp_ms), fmt(r.oamp_ms), fmt(r.ratio),
                  fmt(r.mamp_iter_ms), fmt(r.oamp_iter_ms)});
    }
}

namespace {

// The CSV text re-read as an array of objects; numeric cells become numbers.
nlohmann::ordered_json csv_to_json(const std::string& csv) {
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    const auto cols = split_list(header);
    auto out = nlohmann::ordered_json::array();
    std::string row;
    while (std::getline(in, row)) {
        std::vector<std::string> cells;
        std::stringstream ss(row);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < cols.size() && i < cells.size(); ++i) {
            const auto& s = cells[i];
            const char* end = s.data() + s.size();
            long long k = 0;
            double v = 0.0;
            if (const auto r = std::from_chars(s.data(), end, k); r.ec == std::errc{} && r.ptr == end) {
                obj[cols[i]] = k;
            } else if (const auto d = std::from_chars(s.data(), end, v); d.ec == std::errc{} && d.ptr == end) {
                obj[cols[i]] = v;
            } else {
                obj[cols[i]] = s;
            }
        }
        out.push_back(obj);
    }
    return out;
}

} // namespace

template <class Row>
fs::path write_table(const ExperimentConfig& cfg, const std::string& stem, const std::vector<Row>& rows) {
    fs::create_directories(cfg.output.dir);
    std::ostringstream csv;
    write_csv(csv, rows);
    const bool json = cfg.output.format == "json";
    const fs::path path = fs::path(cfg.output.dir) / (stem + (json ? ".json" : ".csv"));
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    if (json) {
        out << csv_to_json(csv.str()).dump(2) << "\n";
    } else {
        out << csv.str();
    }
    return path;
}

template fs::path write_table(const ExperimentConfig&, const std::string&, const std::vector<BerRecord>&);
template fs::path write_table(const ExperimentConfig&, const std::string&, const std::vector<RateRow>&);
template fs::path write_table(const ExperimentConfig&, const std::string&, const std::vector<SeRecord>&);
template fs::path write_table(const ExperimentConfig&, const std::string&, const std::vector<SeTraceRow>&);
template fs::path write_table(const ExperimentConfig&, const std::string&, const std::vector<RuntimeRecord>&);

std::string version_string() {
    return MAMP_VERSION;
}

fs::path write_manifest(const ExperimentConfig& cfg, const std::string& command, const std::vector<fs::path>& outputs) {
    fs::create_directories(cfg.output.dir);
    nlohmann::json j;
    j["command"] = command;
    j["config_source"] = cfg.source;
    std::ostringstream h;
    h << std::hex << std::setw(16) << std::setfill('0') << cfg.hash();
    j["config_hash"] = h.str();
    j["master_seed"] = cfg.run.master_seed;
    j["channel_seed"] = cfg.channel.seed;
    j["workers"] = cfg.run.workers;
    j["versions"] = {{"mamp", version_string()},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"boost", BOOST_LIB_VERSION},
                     {"compiler", __VERSION__}};
    nlohmann::json settings = nlohmann::json::object();
    std::istringstream canon(cfg.canonical());
    std::string kv;
    while (std::getline(canon, kv)) {
        const auto eq = kv.find(" = ");
        settings[kv.substr(0, eq)] = kv.substr(eq + 3);
    }
    j["config"] = settings;
    j["config_as_read"] = cfg.entries;
    auto files = nlohmann::json::array();
    for (const auto& p : outputs) {
        files.push_back(p.string());
    }
    j["outputs"] = files;
    const fs::path path = fs::path(cfg.output.dir) / "run_manifest.json";
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    return path;
}

} // namespace mamp
