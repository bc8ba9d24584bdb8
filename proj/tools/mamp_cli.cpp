#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "mamp/bench.hpp"

namespace fs = std::filesystem;
using namespace mamp;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string out_dir;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config, "experiment config (key = value lines)")->required()->check(CLI::ExistingFile);
    cmd->add_option("-s,--set", c.overrides, "override a config key, key=value (repeatable)");
    cmd->add_option("-o,--out", c.out_dir, "output directory (overrides output.dir)");
    cmd->add_option("-j,--workers", c.workers, "worker threads (overrides run.workers)");
}

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = load_config(c.config);
    for (const auto& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set", kv, "expected key=value");
        }
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1), fs::current_path());
    }
    if (!c.out_dir.empty()) {
        cfg.output.dir = c.out_dir;
    }
    if (c.workers > 0) {
        cfg.run.workers = c.workers;
    }
    validate(cfg);
    return cfg;
}

void report(const std::vector<fs::path>& files, const fs::path& manifest) {
    for (const auto& f : files) {
        std::cout << "wrote " << f.string() << "\n";
    }
    std::cout << "wrote " << manifest.string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative detection for coded MIMO: rates, BER, state evolution, runtime"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    Common rate_opts;
    Common ber_opts;
    Common se_opts;
    Common bench_opts;
    Common codegen_opts;
    auto* rate = app.add_subcommand("rate", "achievable-rate tables per constellation");
    auto* ber = app.add_subcommand("ber", "coded BER sweep");
    auto* se = app.add_subcommand("se", "detector MSE against the state evolution fixed point");
    auto* bench = app.add_subcommand("bench", "time to a target MSE, MAMP against OAMP/VAMP");
    auto* codegen = app.add_subcommand("codegen", "optimize a degree distribution (and build a code)");
    add_common(rate, rate_opts);
    add_common(ber, ber_opts);
    add_common(se, se_opts);
    add_common(bench, bench_opts);
    add_common(codegen, codegen_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (rate->parsed()) {
            const auto cfg = load(rate_opts);
            std::vector<fs::path> files;
            for (const auto& [name, rows] : run_rate_figure(cfg)) {
                files.push_back(write_table(cfg, "rate_" + name, rows));
            }
            report(files, write_manifest(cfg, "rate", files));
        } else if (ber->parsed()) {
            const auto cfg = load(ber_opts);
            const auto rows = run_ber(cfg);
            write_csv(std::cout, rows);
            const std::vector<fs::path> files{write_table(cfg, "ber", rows)};
            report(files, write_manifest(cfg, "ber", files));
        } else if (se->parsed()) {
            const auto cfg = load(se_opts);
            const auto res = run_se_validation(cfg);
            write_csv(std::cout, res.summary);
            const std::vector<fs::path> files{write_table(cfg, "se_summary", res.summary),
                                              write_table(cfg, "se_trace", res.trace)};
            report(files, write_manifest(cfg, "se", files));
        } else if (bench->parsed()) {
            const auto cfg = load(bench_opts);
            const auto rows = run_runtime_bench(cfg);
            write_csv(std::cout, rows);
            const std::vector<fs::path> files{write_table(cfg, "runtime", rows)};
            report(files, write_manifest(cfg, "bench", files));
        } else if (codegen->parsed()) {
            const auto cfg = load(codegen_opts);
            const DegreeDistribution dd = design_code(cfg);
            std::cout << dd.to_string() << "design rate " << dd.design_rate() << "\n";
            fs::create_directories(cfg.output.dir);
            std::vector<fs::path> files{fs::path(cfg.output.dir) / "code.dd"};
            dd.save(files.back().string());
            if (cfg.code.length > 0) {
                auto code = construct_code(dd, cfg.code.length, cfg.code.seed);
                std::cout << "built n=" << code.n() << " k=" << code.k() << " rate " << code.rate() << "\n";
                files.push_back(fs::path(cfg.output.dir) / "code.alist");
                save_alist(files.back().string(), code);
            }
            report(files, write_manifest(cfg, "codegen", files));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
