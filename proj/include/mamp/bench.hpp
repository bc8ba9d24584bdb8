#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mamp/channel.hpp"
#include "mamp/detect.hpp"
#include "mamp/ldpc.hpp"
#include "mamp/rates.hpp"

namespace mamp {

/// Bad configuration: names the file and the offending key.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& source, const std::string& field, const std::string& message);
    std::string source;
    std::string field;
};

struct ExperimentConfig {
    struct System {
        std::size_t m = 0; // 0: round(n / beta)
        std::size_t n = 256;
        double beta = 1.5;
    } system;
    struct Channel {
        std::string kind = "ill_conditioned"; // ill_conditioned | iid | unitary
        double kappa = 10.0;
        std::uint64_t seed = 1;
        bool redraw = false; // new channel for every trial
    } channel;
    std::vector<double> snr_db_grid;
    struct Detector {
        std::vector<std::string> names{"mamp"}; // mamp | oamp | cas
        std::string constellation = "qpsk";
        DetectorConfig cfg;
    } detector;
    struct Code {
        std::string alist; // parity-check matrix
        std::string dd;    // degree distribution, built with PEG at `length`
        std::size_t length = 0;
        std::uint64_t seed = 1;
        // codegen
        int check_degree = 6;
        int dv_max = 30;
        double margin = 0.05;
        double design_snr_db = 0.0;
    } code;
    struct Run {
        std::size_t trials = 100;
        std::uint64_t master_seed = 1;
        unsigned workers = 1;
        std::size_t max_frame_errors = 100;
    } run;
    struct Output {
        std::string dir = "out";
        std::string format = "csv"; // csv | json
    } output;
    std::vector<std::string> constellations{"qpsk", "qam16", "gaussian"};
    std::vector<std::size_t> bench_sizes{256, 512, 1024};
    double bench_target_mse = 1e-3;

    std::string source = "<memory>";
    std::map<std::string, std::string> entries; // as read, for the manifest

    std::size_t m() const;
    std::size_t m_for(std::size_t n) const;
    /// Sorted key = value lines of every setting, defaults included.
    std::string canonical() const;
    /// FNV-1a of canonical().
    std::uint64_t hash() const;
};

/// Flat text: one `key = value` per line, `#` starts a comment, lists are
/// comma separated. Relative file paths resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& is, const std::string& source = "<memory>",
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::string& path);
/// Applies one `key=value` override. Call validate() once all are in.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir = {});
/// Throws ConfigError for empty grids, zero trials, missing files and the like.
void validate(const ExperimentConfig& cfg);

ChannelMatrix make_channel(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed);
/// Spectrum the rate analysis uses: the ladder itself for structured kinds,
/// the realized singular values for iid.
SingularSpectrum config_spectrum(const ExperimentConfig& cfg);
/// Loads or builds the code named by code.alist / code.dd.
LdpcCode config_code(const ExperimentConfig& cfg);

struct BerRecord {
    double snr_db = 0.0;
    std::string detector_name;
    std::string code_name;
    std::size_t trials = 0;
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    double ber = 0.0;
    double fer = 0.0;
    double mean_iters = 0.0;
    double mean_runtime_ms = 0.0;
};

/// One codeword per trial, info bits only counted. Trials run in blocks of
/// fixed size and are scanned in index order, so the stopping trial does not
/// depend on the worker count.
std::vector<BerRecord> run_ber(const ExperimentConfig& cfg);
std::vector<BerRecord> run_ber(const ExperimentConfig& cfg, const LdpcCode& code);

/// Rate table per constellation name.
std::map<std::string, std::vector<RateRow>> run_rate_figure(const ExperimentConfig& cfg);

struct SeRecord {
    double snr_db = 0.0;
    std::string detector_name;
    std::size_t trials = 0;
    int iters = 0;
    double mse = 0.0;
    double mse_stderr = 0.0;
    double vse_v_star = 0.0;
    double rel_gap = 0.0; // |mse - v*| / v*
};

struct SeTraceRow {
    double snr_db = 0.0;
    std::string detector_name;
    int iter = 0;
    double mse_r = 0.0;
    double mse_x = 0.0;
    double v_gamma = 0.0;
    double vse_v = 0.0; // VSE trajectory at the same iteration
};

struct SeValidation {
    std::vector<SeRecord> summary;
    std::vector<SeTraceRow> trace;
};

/// Genie MAMP and OAMP/VAMP on uncoded frames against the VSE fixed point.
/// Runs stopped early carry their last values forward in the trace.
SeValidation run_se_validation(const ExperimentConfig& cfg);

struct RuntimeRecord {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t trials = 0;
    double target_mse = 0.0;
    double mamp_reached = 0.0; // fraction of trials reaching the target
    double oamp_reached = 0.0;
    double mamp_iters = 0.0;
    double oamp_iters = 0.0;
    double mamp_ms = 0.0;
    double oamp_ms = 0.0;
    double ratio = 0.0;
    double mamp_iter_ms = 0.0; // per-iteration cost, setup excluded
    double oamp_iter_ms = 0.0;
};

/// Time to the target MSE: setup plus linear and denoiser stages, genie
/// bookkeeping excluded. Uses the first SNR of the grid.
std::vector<RuntimeRecord> run_runtime_bench(const ExperimentConfig& cfg);

/// Degree distribution for the configured channel at code.design_snr_db,
/// with the LMMSE-side curve as the target.
DegreeDistribution design_code(const ExperimentConfig& cfg);

/// Columns whose values depend on wall-clock time.
bool is_runtime_column(const std::string& name);

void write_csv(std::ostream& os, const std::vector<BerRecord>& rows);
void write_csv(std::ostream& os, const std::vector<RateRow>& rows);
void write_csv(std::ostream& os, const std::vector<SeRecord>& rows);
void write_csv(std::ostream& os, const std::vector<SeTraceRow>& rows);
void write_csv(std::ostream& os, const std::vector<RuntimeRecord>& rows);

/// Writes `<stem>.csv` or `<stem>.json` under output.dir; returns the path.
template <class Row>
std::filesystem::path write_table(const ExperimentConfig& cfg, const std::string& stem, const std::vector<Row>& rows);

/// run_manifest.json: command, config hash, seeds, library versions, outputs.
std::filesystem::path write_manifest(const ExperimentConfig& cfg, const std::string& command,
                                     const std::vector<std::filesystem::path>& outputs);

std::string version_string();

} // namespace mamp
