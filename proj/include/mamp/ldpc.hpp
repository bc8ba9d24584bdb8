#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mamp/modem.hpp"
#include "mamp/transfer_curve.hpp"

namespace mamp {

/// Edge-perspective degree distribution. `lambda` holds (i, lambda_i): the
/// fraction of edges attached to degree-i variable nodes; `rho` the same for
/// check nodes.
struct DegreeDistribution {
    std::vector<std::pair<int, double>> lambda;
    std::vector<std::pair<int, double>> rho;

    static DegreeDistribution regular(int dv, int dc);

    /// Throws std::invalid_argument unless both lists are nonempty, degrees
    /// are >= 2 and distinct, coefficients are >= 0 and sum to 1 (1e-12), and
    /// the design rate is in (0, 1).
    void validate() const;

    /// 1 - (sum_j rho_j / j) / (sum_i lambda_i / i).
    double design_rate() const;

    /// Node-perspective fractions (lambda_i / i) / sum_j (lambda_j / j).
    std::vector<std::pair<int, double>> variable_node_fractions() const;
    std::vector<std::pair<int, double>> check_node_fractions() const;

    /// "lambda: 2:0.5 3:0.5" / "rho: 6:1".
    std::string to_string() const;
    static DegreeDistribution parse(std::istream& is);
    static DegreeDistribution load(const std::string& path);
    void save(const std::string& path) const;
};

struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Binary LDPC code given by the adjacency lists of its parity-check matrix.
/// Building a code also builds its systematic encoder by GF(2) elimination;
/// if H is rank deficient, k = n - rank(H) > n - checks.
class LdpcCode {
public:
    LdpcCode(std::size_t n, std::vector<std::vector<std::uint32_t>> check_vars, std::string name = "ldpc");

    std::size_t n() const noexcept { return n_; }
    std::size_t checks() const noexcept { return check_vars_.size(); }
    std::size_t k() const noexcept { return n_ - rank_; }
    std::size_t rank() const noexcept { return rank_; }
    std::size_t edges() const noexcept { return edges_; }
    double rate() const noexcept { return static_cast<double>(k()) / static_cast<double>(n_); }
    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    const std::vector<std::vector<std::uint32_t>>& check_vars() const noexcept { return check_vars_; }
    const std::vector<std::vector<std::uint32_t>>& var_checks() const noexcept { return var_checks_; }
    /// Codeword positions carrying the message, in message order.
    const std::vector<std::uint32_t>& info_positions() const noexcept { return info_positions_; }

    /// Degree distribution realized by the graph (edge perspective).
    DegreeDistribution realized_distribution() const;

    bool is_codeword(std::span<const std::uint8_t> bits) const;
    std::vector<std::uint8_t> encode(std::span<const std::uint8_t> message) const;

    /// Number of length-4 cycles (pairs of checks sharing two variables).
    std::size_t four_cycles() const;

    /// Decoder edge layout: edges are numbered check by check, so check c
    /// owns edges [check_offset[c], check_offset[c+1]); var_edges lists each
    /// variable's edges in the same CSR fashion through var_offset.
    const std::vector<std::uint32_t>& edge_var() const noexcept { return edge_var_; }
    const std::vector<std::uint32_t>& check_offset() const noexcept { return check_offset_; }
    const std::vector<std::uint32_t>& var_offset() const noexcept { return var_offset_; }
    const std::vector<std::uint32_t>& var_edges() const noexcept { return var_edges_; }

private:
    void build_encoder();

    std::size_t n_;
    std::vector<std::vector<std::uint32_t>> check_vars_;
    std::vector<std::vector<std::uint32_t>> var_checks_;
    std::string name_;
    std::size_t edges_ = 0;
    std::size_t rank_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint32_t> info_positions_;
    std::vector<std::uint32_t> pivot_cols_;
    std::vector<std::uint64_t> reduced_; // rank_ rows of words_ words, reduced row echelon form
    std::vector<std::uint32_t> edge_var_;
    std::vector<std::uint32_t> check_offset_;
    std::vector<std::uint32_t> var_offset_;
    std::vector<std::uint32_t> var_edges_;
};

/// Progressive edge growth with depth-limited breadth-first search. Variable
/// counts per degree come from largest-remainder rounding of n times the
/// node fractions; check degrees are then adjusted by one where needed so
/// the socket counts match.
LdpcCode construct_code(const DegreeDistribution& dd, std::size_t n, std::uint64_t seed, int search_depth = 3);

std::vector<std::uint8_t> encode(const LdpcCode& code, std::span<const std::uint8_t> message);

struct BpResult {
    std::vector<double> llr_post; // a posteriori, log P(0)/P(1)
    std::vector<std::uint8_t> hard;
    int iterations = 0;
    bool converged = false;
};

inline constexpr double kLlrClip = 30.0;

/// Flooding sum-product decoding. Input LLRs are clipped to +-kLlrClip.
/// Stops as soon as the hard decisions satisfy every check.
BpResult bp_decode(const LdpcCode& code, std::span<const double> llr_in, int max_iters);

/// MacKay's alist format (see docs/alist.md).
void write_alist(std::ostream& os, const LdpcCode& code);
LdpcCode read_alist(std::istream& is, std::string name = "ldpc");
LdpcCode load_alist(const std::string& path);
void save_alist(const std::string& path, const LdpcCode& code);

/// Monte Carlo decoder transfer: APP symbol MSE after demapping and BP on
/// r = sqrt(rho) x + z, averaged over `trials` random codewords per point
/// with standard errors attached. Deterministic in `seed` for any `workers`.
TransferCurve measure_decoder_transfer(const LdpcCode& code, const Constellation& c,
                                       const std::vector<double>& rho_grid, std::size_t trials,
                                       std::uint64_t seed, int max_iters = 200, unsigned workers = 1);

struct TunnelVerdict {
    bool open = true;
    double closed_at = 0.0; // first violating rho when !open
    std::string note;       // set when curves had to be resampled
};

/// Open iff curve_c(rho) < min{curve_s(rho), eta_inv(rho)} at every grid
/// point of curve_c in [0, rho_max]. A decoder value below `zero_tol` counts
/// as zero and always passes. Other curves are interpolated onto the grid of
/// curve_c when their abscissas differ.
TunnelVerdict check_tunnel(const TransferCurve& curve_c, const TransferCurve& curve_s, const TransferCurve& eta_inv,
                           double rho_max, double zero_tol = 1e-9);

// Gaussian-approximation density evolution ----------------------------------

/// 1 - E[tanh(L/2)] for L ~ N(mu, 2 mu) (consistent Gaussian LLR).
double ga_phi(double mu);
/// Inverse of ga_phi on (0, 1].
double ga_phi_inv(double y);

/// Mean of the channel bit LLR on r = sqrt(rho) x + z, per bit level of
/// the constellation, with the squared amplitude weight of that level.
/// Only BPSK and QPSK are supported (Gaussian LLRs, consistent).
std::vector<std::pair<double, double>> ga_bit_channels(const Constellation& c, double rho);

/// GA-DE prediction of the APP decoder symbol MSE at SINR rho.
double ga_decoder_mmse(const DegreeDistribution& dd, const Constellation& c, double rho, int max_iters = 500);

struct DesignInfeasible : std::runtime_error {
    DesignInfeasible(const std::string& what, double rho) : std::runtime_error(what), binding_rho(rho) {}
    double binding_rho;
};

struct DesignOptions {
    std::size_t x_points = 48;     // check-message means sampled per SINR constraint
    double target_floor = 1e-5;    // target values below this are raised to it
    bool limit_degree_two = true;  // lambda_2 <= 2 / dc (degree-2 subgraph is a forest)
};

/// Linear program over lambda (single check degree): maximize the design
/// rate subject to the GA-DE decoder MSE staying below (1 - margin) * target
/// at every grid SINR where the target lies below the demodulator MMSE.
/// Throws DesignInfeasible naming the binding SINR.
DegreeDistribution optimize_degree_distribution(const TransferCurve& target, const Constellation& c, int check_degree,
                                                int dv_max, double margin, const DesignOptions& opts = {});

} // namespace mamp
