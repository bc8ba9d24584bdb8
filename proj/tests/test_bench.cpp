#include "doctest.h"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mamp/bench.hpp"
#include "mamp/sim.hpp"

using namespace mamp;
namespace fs = std::filesystem;

namespace {

ExperimentConfig from_text(const std::string& text, const fs::path& base = {}) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg", base);
}

std::string config_error_field(const std::string& text) {
    try {
        (void)from_text(text);
    } catch (const ConfigError& e) {
        return e.field;
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mamp_test_bench_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// CSV text with the named columns blanked out.
std::string without_columns(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<bool> drop;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
        drop.push_back(is_runtime_column(cell));
    }
    std::string out = line + "\n";
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::size_t i = 0;
        while (std::getline(ls, cell, ',')) {
            out += (i < drop.size() && drop[i]) ? "-" : cell;
            out += ",";
            ++i;
        }
        out += "\n";
    }
    return out;
}

ExperimentConfig small_ber_config() {
    ExperimentConfig cfg = from_text("system.n = 16\n"
                                     "system.beta = 1\n"
                                     "channel.kappa = 3\n"
                                     "snr_db_grid = 40\n"
                                     "detector.name = mamp, oamp, cas\n"
                                     "detector.max_iters = 10\n"
                                     "detector.bp_iters = 20\n"
                                     "run.trials = 6\n");
    return cfg;
}

} // namespace

TEST_CASE("config: keys, comments, lists and ranges") {
    const auto cfg = from_text("# header\n"
                               "system.n = 128   # trailing\n"
                               "system.beta = 2\n"
                               "channel.kind = iid\n"
                               "snr_db_grid = 0:2.5:10, 12\n"
                               "detector.name = mamp, oamp\n"
                               "detector.theta_mode = spectral\n"
                               "detector.xi_mode = fixed_one\n"
                               "detector.genie_variances = false\n"
                               "run.trials = 7\n"
                               "rate.constellations = qpsk\n"
                               "bench.sizes = 64, 128\n");
    CHECK(cfg.system.n == 128);
    CHECK(cfg.m() == 64);
    CHECK(cfg.channel.kind == "iid");
    CHECK(cfg.snr_db_grid == std::vector<double>{0.0, 2.5, 5.0, 7.5, 10.0, 12.0});
    CHECK(cfg.detector.names == std::vector<std::string>{"mamp", "oamp"});
    CHECK(cfg.detector.cfg.theta_mode == ThetaMode::spectral);
    CHECK(cfg.detector.cfg.xi_mode == XiMode::fixed_one);
    CHECK_FALSE(cfg.detector.cfg.genie_variances);
    CHECK(cfg.run.trials == 7);
    CHECK(cfg.constellations == std::vector<std::string>{"qpsk"});
    CHECK(cfg.bench_sizes == std::vector<std::size_t>{64, 128});
    CHECK(cfg.m_for(64) == 32);
}

TEST_CASE("config errors name the field") {
    CHECK(config_error_field("snr_db_grid = 1\nsystem.nn = 3\n") == "system.nn");
    CHECK(config_error_field("snr_db_grid = 1\nsystem.n = many\n") == "system.n");
    CHECK(config_error_field("system.n = 8\n") == "snr_db_grid");
    CHECK(config_error_field("snr_db_grid = 1\nrun.trials = 0\n") == "run.trials");
    CHECK(config_error_field("snr_db_grid = 1\ncode.alist = /nonexistent/h.alist\n") == "code.alist");
    CHECK(config_error_field("snr_db_grid = 1\ndetector.name = zf\n") == "detector.name");
    CHECK(config_error_field("snr_db_grid = 1\nchannel.kind = rayleigh\n") == "channel.kind");
    CHECK(config_error_field("snr_db_grid = 1\nchannel.kind = unitary\nsystem.beta = 1.5\n") == "channel.kind");
    CHECK(config_error_field("snr_db_grid = 1\nchannel.redraw = maybe\n") == "channel.redraw");
    CHECK(config_error_field("snr_db_grid = 1\njust words\n") == "line 2");
    CHECK(config_error_field("snr_db_grid = 1\ncode.dd = /nonexistent.dd\n") == "code.dd");

    try {
        (void)from_text("snr_db_grid = 1\nrun.trials = 0\n");
        FAIL("no error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("test.cfg") != std::string::npos);
        CHECK(std::string(e.what()).find("run.trials") != std::string::npos);
    }
}

TEST_CASE("config: relative files resolve against the config directory") {
    const auto dir = scratch("paths");
    DegreeDistribution::regular(3, 6).save((dir / "reg.dd").string());
    {
        std::ofstream out(dir / "exp.cfg");
        out << "snr_db_grid = 3\ncode.dd = reg.dd\ncode.length = 96\n";
    }
    const auto cfg = load_config((dir / "exp.cfg").string());
    CHECK(fs::equivalent(cfg.code.dd, dir / "reg.dd"));
    const auto code = config_code(cfg);
    CHECK(code.n() == 96);
    CHECK(code.name() == "reg");
    CHECK_THROWS_AS((void)load_config((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("config hash follows the settings") {
    auto a = from_text("snr_db_grid = 1, 2\n");
    const auto b = from_text("# same thing\nsnr_db_grid = 1,2\n");
    CHECK(a.hash() == b.hash());
    set_config_value(a, "run.master_seed", "9");
    CHECK(a.hash() != b.hash());
    CHECK(a.canonical().find("run.master_seed = 9\n") != std::string::npos);
}

TEST_CASE("BER: error-free at very high SNR") {
    const auto cfg = small_ber_config();
    const auto code = construct_code(DegreeDistribution::regular(3, 6), 96, 1);
    const auto rows = run_ber(cfg, code);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.ber == 0.0);
        CHECK(r.fer == 0.0);
        CHECK(r.trials == 6);
        CHECK(r.bits == 6 * code.k());
        CHECK(r.mean_iters >= 1.0);
    }
    CHECK(rows[0].detector_name == "mamp");
    CHECK(rows[2].detector_name == "cas");
}

TEST_CASE("BER: early stop at the frame-error budget, estimator over simulated bits") {
    auto cfg = small_ber_config();
    set_config_value(cfg, "snr_db_grid", "-10");
    set_config_value(cfg, "detector.name", "mamp");
    set_config_value(cfg, "run.trials", "50");
    set_config_value(cfg, "run.max_frame_errors", "3");
    const auto code = construct_code(DegreeDistribution::regular(3, 6), 96, 1);
    const auto rows = run_ber(cfg, code);
    REQUIRE(rows.size() == 1);
    const auto& r = rows[0];
    CHECK(r.trials == 3);
    CHECK(r.fer == 1.0);
    CHECK(r.bits == 3 * code.k());
    CHECK(r.ber == doctest::Approx(static_cast<double>(r.bit_errors) / static_cast<double>(r.bits)));
    CHECK(r.ber > 0.1);
    CHECK(r.ber <= 1.0);
}

TEST_CASE("BER: identical output for any worker count, channel redraw included") {
    auto cfg = small_ber_config();
    set_config_value(cfg, "snr_db_grid", "0, 3, 6");
    set_config_value(cfg, "detector.name", "mamp, oamp");
    set_config_value(cfg, "run.trials", "20");
    set_config_value(cfg, "run.max_frame_errors", "5");
    const auto code = construct_code(DegreeDistribution::regular(3, 6), 96, 1);
    for (const char* redraw : {"false", "true"}) {
        set_config_value(cfg, "channel.redraw", redraw);
        std::string csv[2];
        for (int w = 0; w < 2; ++w) {
            set_config_value(cfg, "run.workers", w == 0 ? "1" : "3");
            std::ostringstream os;
            write_csv(os, run_ber(cfg, code));
            csv[w] = without_columns(os.str());
        }
        CHECK(csv[0] == csv[1]);
    }
}

TEST_CASE("BER rejects a code that does not fit the constellation") {
    auto cfg = small_ber_config();
    set_config_value(cfg, "detector.constellation", "qam16");
    const auto code = construct_code(DegreeDistribution::regular(3, 6), 98, 1);
    CHECK_THROWS_AS((void)run_ber(cfg, code), ConfigError);
    set_config_value(cfg, "detector.constellation", "gaussian");
    CHECK_THROWS_AS((void)run_ber(cfg, code), ConfigError);
    CHECK_THROWS_AS((void)run_ber(cfg), ConfigError); // no code configured
}

TEST_CASE("rate figure: unitary equality, conditioning order, Gaussian column") {
    auto cfg = from_text("system.n = 64\nsystem.beta = 1\nsnr_db_grid = 0, 10, 20\nchannel.kind = unitary\n");
    const auto flat = run_rate_figure(cfg);
    REQUIRE(flat.size() == 3);
    for (const auto& [name, rows] : flat) {
        for (const auto& r : rows) {
            CHECK(r.rate_cas == doctest::Approx(r.rate_mamp).epsilon(1e-6));
        }
    }
    set_config_value(cfg, "channel.kind", "ill_conditioned");
    set_config_value(cfg, "system.beta", "1.5");
    set_config_value(cfg, "channel.kappa", "10");
    const auto k10 = run_rate_figure(cfg);
    set_config_value(cfg, "channel.kappa", "50");
    const auto k50 = run_rate_figure(cfg);
    for (const auto& name : {"qpsk", "qam16", "gaussian"}) {
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(k50.at(name)[i].rate_mamp <= k10.at(name)[i].rate_mamp + 1e-9);
        }
    }
    for (const auto& r : k50.at("gaussian")) {
        CHECK(r.rate_mamp == doctest::Approx(r.capacity_gaussian).epsilon(0.005));
    }
}

TEST_CASE("state evolution check on a small well-conditioned system") {
    const auto cfg = from_text("system.n = 256\nsystem.beta = 1.5\nchannel.kappa = 3\nsnr_db_grid = 6\n"
                               "detector.max_iters = 20\nrun.trials = 4\nchannel.redraw = true\n");
    const auto res = run_se_validation(cfg);
    REQUIRE(res.summary.size() == 2);
    CHECK(res.trace.size() == 40);
    for (const auto& s : res.summary) {
        CHECK(s.trials == 4);
        CHECK(s.rel_gap < 0.1);
    }
    CHECK(res.trace.front().detector_name == "mamp");
    CHECK(res.trace.back().detector_name == "oamp");
    CHECK(res.trace.back().iter == 20);
    CHECK(res.trace.back().vse_v == doctest::Approx(res.summary[1].vse_v_star).epsilon(1e-3));
}

TEST_CASE("runtime bench reports both detectors to the target") {
    const auto cfg = from_text("system.beta = 1.5\nchannel.kappa = 3\nsnr_db_grid = 15\nbench.sizes = 64, 128\n"
                               "bench.target_mse = 1e-3\nrun.trials = 2\ndetector.max_iters = 60\n");
    const auto rows = run_runtime_bench(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].n == 64);
    CHECK(rows[1].m == 85);
    for (const auto& r : rows) {
        CHECK(r.mamp_reached == 1.0);
        CHECK(r.oamp_reached == 1.0);
        CHECK(r.mamp_iters >= r.oamp_iters);
        CHECK(r.ratio == doctest::Approx(r.mamp_ms / r.oamp_ms));
        CHECK(r.mamp_iter_ms > 0.0);
    }
}

TEST_CASE("one iteration of MAMP is cheaper than one of OAMP/VAMP from N = 512") {
    const Constellation q = Constellation::qpsk();
    for (const std::size_t n : {512U, 1024U}) {
        const auto a = gen_ill_conditioned(n * 2 / 3, n, 10.0, 4);
        Rng rng(1);
        const auto f = random_frame(a, q, 1, 0.1, rng);
        DetectorConfig dc;
        dc.max_iters = 1;
        ConstellationDenoiser nld(q);
        double best[2] = {1e300, 1e300};
        for (int rep = 0; rep < 5; ++rep) {
            for (int d = 0; d < 2; ++d) {
                const auto t0 = std::chrono::steady_clock::now();
                (void)(d == 0 ? run_mamp(f.y, a, 0.1, nld, dc) : run_oamp_vamp(f.y, a, 0.1, nld, dc));
                best[d] = std::min(best[d], std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            }
        }
        CHECK(best[0] < best[1]);
    }
}

TEST_CASE("tables: CSV headers, JSON rows and the manifest") {
    auto cfg = from_text("snr_db_grid = 1\n");
    const auto dir = scratch("out");
    cfg.output.dir = dir.string();
    BerRecord r;
    r.snr_db = 2.5;
    r.detector_name = "mamp";
    r.code_name = "c";
    r.trials = 4;
    r.bit_errors = 3;
    r.bits = 400;
    r.ber = 0.0075;
    r.fer = 0.25;
    const auto csv_path = write_table(cfg, "ber", std::vector<BerRecord>{r});
    std::ifstream csv(csv_path);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "snr_db,detector_name,code_name,trials,bit_errors,bits,ber,fer,mean_iters,mean_runtime_ms");

    cfg.output.format = "json";
    const auto json_path = write_table(cfg, "ber", std::vector<BerRecord>{r});
    CHECK(json_path.extension() == ".json");
    std::ifstream js(json_path);
    const auto rows = nlohmann::json::parse(js);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0]["detector_name"] == "mamp");
    CHECK(rows[0]["bits"].get<double>() == 400.0);

    std::ostringstream rate_csv;
    write_csv(rate_csv, std::vector<RateRow>{});
    CHECK(rate_csv.str() == "snr_db,rate_mamp,rate_cas,capacity_gaussian\n");

    const auto manifest_path = write_manifest(cfg, "ber", {csv_path, json_path});
    std::ifstream mf(manifest_path);
    const auto m = nlohmann::json::parse(mf);
    CHECK(m["command"] == "ber");
    CHECK(m["master_seed"] == 1);
    CHECK(m["config_hash"].get<std::string>().size() == 16);
    CHECK(m["outputs"].size() == 2);
    CHECK(m["versions"].contains("eigen"));
    CHECK(m["config"]["snr_db_grid"] == "1");
}
