#include "mamp/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "mamp/rng.hpp"

namespace mamp {

namespace {

void check_side(const std::vector<std::pair<int, double>>& side, const char* label) {
    if (side.empty()) {
        throw std::invalid_argument(std::string("degree distribution: empty ") + label + " list");
    }
    double sum = 0.0;
    std::vector<int> seen;
    for (const auto& [deg, coeff] : side) {
        if (deg < 2) {
            throw std::invalid_argument(std::string("degree distribution: ") + label + " degree " +
                                        std::to_string(deg) + " < 2");
        }
        if (!(coeff >= 0.0) || !std::isfinite(coeff)) {
            throw std::invalid_argument(std::string("degree distribution: negative ") + label + " coefficient");
        }
        if (std::find(seen.begin(), seen.end(), deg) != seen.end()) {
            throw std::invalid_argument(std::string("degree distribution: repeated ") + label + " degree");
        }
        seen.push_back(deg);
        sum += coeff;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument(std::string("degree distribution: ") + label + " coefficients must sum to 1");
    }
}

double inverse_mean(const std::vector<std::pair<int, double>>& side) {
    double s = 0.0;
    for (const auto& [deg, coeff] : side) {
        s += coeff / deg;
    }
    return s;
}

std::vector<std::pair<int, double>> node_fractions(const std::vector<std::pair<int, double>>& side) {
    const double total = inverse_mean(side);
    std::vector<std::pair<int, double>> out;
    for (const auto& [deg, coeff] : side) {
        out.emplace_back(deg, coeff / deg / total);
    }
    return out;
}

// Largest-remainder rounding of total * fractions to integers summing to total.
std::vector<std::size_t> apportion(const std::vector<double>& fractions, std::size_t total) {
    std::vector<std::size_t> counts(fractions.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        const double exact = fractions[i] * static_cast<double>(total);
        counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        assigned += counts[i];
        rem.emplace_back(exact - static_cast<double>(counts[i]), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; assigned < total && j < rem.size(); ++j, ++assigned) {
        ++counts[rem[j].second];
    }
    return counts;
}

std::string format_side(const std::vector<std::pair<int, double>>& side) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& [deg, coeff] : side) {
        os << ' ' << deg << ':' << coeff;
    }
    return os.str();
}

std::vector<std::pair<int, double>> parse_side(const std::string& line, const std::string& key) {
    const auto colon = line.find(':');
    if (colon == std::string::npos || line.substr(0, colon) != key) {
        throw std::runtime_error("degree distribution: expected line starting with '" + key + ":'");
    }
    std::istringstream is(line.substr(colon + 1));
    std::vector<std::pair<int, double>> out;
    std::string tok;
    while (is >> tok) {
        const auto c = tok.find(':');
        if (c == std::string::npos) {
            throw std::runtime_error("degree distribution: malformed entry '" + tok + "'");
        }
        out.emplace_back(std::stoi(tok.substr(0, c)), std::stod(tok.substr(c + 1)));
    }
    return out;
}

} // namespace

DegreeDistribution DegreeDistribution::regular(int dv, int dc) {
    DegreeDistribution dd{{{dv, 1.0}}, {{dc, 1.0}}};
    dd.validate();
    return dd;
}

void DegreeDistribution::validate() const {
    check_side(lambda, "lambda");
    check_side(rho, "rho");
    const double r = design_rate();
    if (!(r > 0.0 && r < 1.0)) {
        throw std::invalid_argument("degree distribution: design rate outside (0, 1)");
    }
}

double DegreeDistribution::design_rate() const {
    return 1.0 - inverse_mean(rho) / inverse_mean(lambda);
}

std::vector<std::pair<int, double>> DegreeDistribution::variable_node_fractions() const {
    return node_fractions(lambda);
}

std::vector<std::pair<int, double>> DegreeDistribution::check_node_fractions() const {
    return node_fractions(rho);
}

std::string DegreeDistribution::to_string() const {
    return "lambda:" + format_side(lambda) + "\nrho:" + format_side(rho) + "\n";
}

DegreeDistribution DegreeDistribution::parse(std::istream& is) {
    std::string l1;
    std::string l2;
    if (!std::getline(is, l1) || !std::getline(is, l2)) {
        throw std::runtime_error("degree distribution: expected two lines");
    }
    DegreeDistribution dd{parse_side(l1, "lambda"), parse_side(l2, "rho")};
    // Text round-off: renormalize, then validate.
    for (auto* side : {&dd.lambda, &dd.rho}) {
        double s = 0.0;
        for (const auto& e : *side) {
            s += e.second;
        }
        if (std::abs(s - 1.0) < 1e-9) {
            for (auto& e : *side) {
                e.second /= s;
            }
        }
    }
    dd.validate();
    return dd;
}

DegreeDistribution DegreeDistribution::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open degree distribution file " + path);
    }
    return parse(is);
}

void DegreeDistribution::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write " + path);
    }
    os << to_string();
}

LdpcCode::LdpcCode(std::size_t n, std::vector<std::vector<std::uint32_t>> check_vars, std::string name)
    : n_(n), check_vars_(std::move(check_vars)), var_checks_(n), name_(std::move(name)) {
    if (n == 0 || check_vars_.empty()) {
        throw std::invalid_argument("LdpcCode: need at least one variable and one check");
    }
    for (std::size_t c = 0; c < check_vars_.size(); ++c) {
        auto& row = check_vars_[c];
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
            throw std::invalid_argument("LdpcCode: duplicate edge in check " + std::to_string(c));
        }
        for (auto v : row) {
            if (v >= n) {
                throw std::invalid_argument("LdpcCode: variable index out of range");
            }
            var_checks_[v].push_back(static_cast<std::uint32_t>(c));
        }
        edges_ += row.size();
    }
    check_offset_.assign(1, 0);
    for (const auto& row : check_vars_) {
        edge_var_.insert(edge_var_.end(), row.begin(), row.end());
        check_offset_.push_back(static_cast<std::uint32_t>(edge_var_.size()));
    }
    var_offset_.assign(n_ + 1, 0);
    for (auto v : edge_var_) {
        ++var_offset_[v + 1];
    }
    std::partial_sum(var_offset_.begin(), var_offset_.end(), var_offset_.begin());
    var_edges_.resize(edge_var_.size());
    std::vector<std::uint32_t> fill(var_offset_.begin(), var_offset_.end() - 1);
    for (std::uint32_t e = 0; e < edge_var_.size(); ++e) {
        var_edges_[fill[edge_var_[e]]++] = e;
    }
    build_encoder();
}

void LdpcCode::build_encoder() {
    words_ = (n_ + 63) / 64;
    const std::size_t m = check_vars_.size();
    std::vector<std::uint64_t> rows(m * words_, 0);
    for (std::size_t c = 0; c < m; ++c) {
        for (auto v : check_vars_[c]) {
            rows[c * words_ + v / 64] |= std::uint64_t{1} << (v % 64);
        }
    }
    auto row = [&](std::size_t r) { return rows.data() + r * words_; };
    std::size_t rank = 0;
    std::vector<char> is_pivot(n_, 0);
    pivot_cols_.clear();
    for (std::size_t col = 0; col < n_ && rank < m; ++col) {
        const std::size_t w = col / 64;
        const std::uint64_t bit = std::uint64_t{1} << (col % 64);
        std::size_t p = rank;
        while (p < m && !(row(p)[w] & bit)) {
            ++p;
        }
        if (p == m) {
            continue;
        }
        if (p != rank) {
            std::swap_ranges(row(p), row(p) + words_, row(rank));
        }
        const std::uint64_t* pr = row(rank);
        for (std::size_t r = 0; r < m; ++r) {
            if (r != rank && (row(r)[w] & bit)) {
                std::uint64_t* rr = row(r);
                for (std::size_t j = w; j < words_; ++j) {
                    rr[j] ^= pr[j];
                }
            }
        }
        pivot_cols_.push_back(static_cast<std::uint32_t>(col));
        is_pivot[col] = 1;
        ++rank;
    }
    rank_ = rank;
    rows.resize(rank * words_);
    reduced_ = std::move(rows);
    info_positions_.clear();
    for (std::size_t v = 0; v < n_; ++v) {
        if (!is_pivot[v]) {
            info_positions_.push_back(static_cast<std::uint32_t>(v));
        }
    }
}

DegreeDistribution LdpcCode::realized_distribution() const {
    std::map<int, double> lam;
    std::map<int, double> rho;
    for (const auto& vc : var_checks_) {
        lam[static_cast<int>(vc.size())] += static_cast<double>(vc.size());
    }
    for (const auto& cv : check_vars_) {
        rho[static_cast<int>(cv.size())] += static_cast<double>(cv.size());
    }
    DegreeDistribution dd;
    const auto e = static_cast<double>(edges_);
    for (const auto& [d, c] : lam) {
        dd.lambda.emplace_back(d, c / e);
    }
    for (const auto& [d, c] : rho) {
        dd.rho.emplace_back(d, c / e);
    }
    return dd;
}

bool LdpcCode::is_codeword(std::span<const std::uint8_t> bits) const {
    if (bits.size() != n_) {
        return false;
    }
    for (const auto& cv : check_vars_) {
        unsigned parity = 0;
        for (auto v : cv) {
            parity ^= bits[v] & 1U;
        }
        if (parity) {
            return false;
        }
    }
    return true;
}

std::vector<std::uint8_t> LdpcCode::encode(std::span<const std::uint8_t> message) const {
    if (message.size() != k()) {
        throw std::invalid_argument("encode: message length " + std::to_string(message.size()) + " != k = " +
                                    std::to_string(k()));
    }
    std::vector<std::uint64_t> packed(words_, 0);
    std::vector<std::uint8_t> cw(n_, 0);
    for (std::size_t i = 0; i < message.size(); ++i) {
        if (message[i] & 1U) {
            const auto v = info_positions_[i];
            packed[v / 64] |= std::uint64_t{1} << (v % 64);
            cw[v] = 1;
        }
    }
    // Row r of the reduced matrix reads: c[pivot_r] + sum over info columns = 0.
    for (std::size_t r = 0; r < rank_; ++r) {
        const std::uint64_t* row = reduced_.data() + r * words_;
        unsigned parity = 0;
        for (std::size_t j = 0; j < words_; ++j) {
            parity += static_cast<unsigned>(std::popcount(row[j] & packed[j]));
        }
        cw[pivot_cols_[r]] = static_cast<std::uint8_t>(parity & 1U);
    }
    return cw;
}

std::size_t LdpcCode::four_cycles() const {
    std::size_t count = 0;
    std::vector<std::uint32_t> mark(check_vars_.size(), 0);
    std::uint32_t stamp = 0;
    for (std::size_t v = 0; v < n_; ++v) {
        // Count checks pairs (c1, c2) through v that meet again at some v' > v.
        for (auto c : var_checks_[v]) {
            ++stamp;
            for (auto c2 : var_checks_[v]) {
                if (c2 > c) {
                    mark[c2] = stamp;
                }
            }
            for (auto v2 : check_vars_[c]) {
                if (v2 <= v) {
                    continue;
                }
                for (auto c2 : var_checks_[v2]) {
                    if (c2 != c && mark[c2] == stamp) {
                        ++count;
                    }
                }
            }
        }
    }
    return count;
}

std::vector<std::uint8_t> encode(const LdpcCode& code, std::span<const std::uint8_t> message) {
    return code.encode(message);
}

namespace {

bool contains(const std::vector<std::uint32_t>& list, std::uint32_t x) {
    return std::find(list.begin(), list.end(), x) != list.end();
}

// True if edge (v, c) lies on a length-4 cycle.
bool on_four_cycle(const std::vector<std::vector<std::uint32_t>>& cv, const std::vector<std::vector<std::uint32_t>>& vc,
                   std::uint32_t v, std::uint32_t c) {
    for (auto v2 : cv[c]) {
        if (v2 == v) {
            continue;
        }
        for (auto c2 : vc[v]) {
            if (c2 != c && contains(cv[c2], v2)) {
                return true;
            }
        }
    }
    return false;
}

void move_edge(std::vector<std::vector<std::uint32_t>>& cv, std::vector<std::vector<std::uint32_t>>& vc,
               std::uint32_t v, std::uint32_t from, std::uint32_t to) {
    *std::find(cv[from].begin(), cv[from].end(), v) = cv[from].back();
    cv[from].pop_back();
    cv[to].push_back(v);
    *std::find(vc[v].begin(), vc[v].end(), from) = to;
}

// PEG leftovers: the last few edges may have to close a 4-cycle. Swap the
// check ends of such an edge with a random edge elsewhere (degrees kept)
// whenever neither new edge lies on a 4-cycle.
void remove_four_cycles(std::vector<std::vector<std::uint32_t>>& cv, std::vector<std::vector<std::uint32_t>>& vc,
                        Rng& rng) {
    const std::size_t m = cv.size();
    if (m < 2) {
        return;
    }
    std::uniform_int_distribution<std::size_t> pick_check(0, m - 1);
    for (int sweep = 0; sweep < 20; ++sweep) {
        bool clean = true;
        for (std::uint32_t v = 0; v < vc.size(); ++v) {
            for (std::size_t e = 0; e < vc[v].size(); ++e) {
                const auto c = vc[v][e];
                if (!on_four_cycle(cv, vc, v, c)) {
                    continue;
                }
                clean = false;
                for (int attempt = 0; attempt < 500; ++attempt) {
                    const auto c2 = static_cast<std::uint32_t>(pick_check(rng));
                    if (c2 == c || cv[c2].empty() || contains(vc[v], c2)) {
                        continue;
                    }
                    std::uniform_int_distribution<std::size_t> pick_var(0, cv[c2].size() - 1);
                    const auto v2 = cv[c2][pick_var(rng)];
                    if (contains(vc[v2], c)) {
                        continue;
                    }
                    move_edge(cv, vc, v, c, c2);
                    move_edge(cv, vc, v2, c2, c);
                    if (!on_four_cycle(cv, vc, v, c2) && !on_four_cycle(cv, vc, v2, c)) {
                        break;
                    }
                    move_edge(cv, vc, v2, c, c2);
                    move_edge(cv, vc, v, c2, c);
                }
            }
        }
        if (clean) {
            return;
        }
    }
}

} // namespace

LdpcCode construct_code(const DegreeDistribution& dd, std::size_t n, std::uint64_t seed, int search_depth) {
    dd.validate();
    if (n < 2) {
        throw ConstructionError("construct_code: n must be >= 2");
    }
    // Variable degrees.
    const auto vfrac = dd.variable_node_fractions();
    std::vector<double> vf;
    for (const auto& e : vfrac) {
        vf.push_back(e.second);
    }
    const auto vcount = apportion(vf, n);
    std::vector<int> var_degree;
    for (std::size_t i = 0; i < vfrac.size(); ++i) {
        var_degree.insert(var_degree.end(), vcount[i], vfrac[i].first);
    }
    // PEG processes low-degree variables first.
    std::sort(var_degree.begin(), var_degree.end());
    const std::size_t edges = std::accumulate(var_degree.begin(), var_degree.end(), std::size_t{0},
                                              [](std::size_t a, int d) { return a + static_cast<std::size_t>(d); });

    // Check degrees: count from the edge total, then fix the socket sum.
    const auto cfrac = dd.check_node_fractions();
    const double m_exact = static_cast<double>(edges) * std::accumulate(dd.rho.begin(), dd.rho.end(), 0.0,
                                                                        [](double a, const auto& e) {
                                                                            return a + e.second / e.first;
                                                                        });
    const auto m = static_cast<std::size_t>(std::llround(m_exact));
    if (m == 0) {
        throw ConstructionError("construct_code: no check nodes for n = " + std::to_string(n));
    }
    std::vector<double> cf;
    for (const auto& e : cfrac) {
        cf.push_back(e.second);
    }
    const auto ccount = apportion(cf, m);
    std::vector<int> check_degree;
    for (std::size_t i = 0; i < cfrac.size(); ++i) {
        check_degree.insert(check_degree.end(), ccount[i], cfrac[i].first);
    }
    long long diff = static_cast<long long>(edges) -
                     std::accumulate(check_degree.begin(), check_degree.end(), 0LL);
    for (std::size_t i = 0; diff != 0; i = (i + 1) % m) {
        if (diff > 0) {
            ++check_degree[i];
            --diff;
        } else if (check_degree[i] > 2) {
            --check_degree[i];
            ++diff;
        }
    }
    const int max_vdeg = var_degree.empty() ? 0 : var_degree.back();
    if (static_cast<std::size_t>(max_vdeg) > m) {
        throw ConstructionError("construct_code: variable degree " + std::to_string(max_vdeg) + " exceeds " +
                                std::to_string(m) + " checks");
    }
    if (static_cast<std::size_t>(*std::max_element(check_degree.begin(), check_degree.end())) > n) {
        throw ConstructionError("construct_code: check degree exceeds n");
    }

    Rng rng(seed);
    std::vector<int> free_sockets = check_degree;
    std::vector<std::vector<std::uint32_t>> cv(m);
    std::vector<std::vector<std::uint32_t>> vc(n);
    std::vector<std::uint32_t> check_mark(m, 0);
    std::vector<std::uint32_t> var_mark(n, 0);
    std::uint32_t stamp = 0;
    std::vector<std::uint32_t> candidates;

    // Among `pool`, the checks with the most free sockets; random tie-break.
    auto pick = [&](const std::vector<std::uint32_t>& pool) {
        int best = 0;
        for (auto c : pool) {
            best = std::max(best, free_sockets[c]);
        }
        std::vector<std::uint32_t> top;
        for (auto c : pool) {
            if (free_sockets[c] == best) {
                top.push_back(c);
            }
        }
        std::uniform_int_distribution<std::size_t> u(0, top.size() - 1);
        return top[u(rng)];
    };

    for (std::size_t v = 0; v < n; ++v) {
        for (int e = 0; e < var_degree[v]; ++e) {
            candidates.clear();
            ++stamp;
            for (auto c : vc[v]) {
                check_mark[c] = stamp;
            }
            if (!vc[v].empty()) {
                // Breadth-first expansion from v; remember the last frontier.
                std::vector<std::uint32_t> frontier(vc[v].begin(), vc[v].end());
                var_mark[v] = stamp;
                std::vector<std::vector<std::uint32_t>> layers{frontier};
                for (int depth = 0; depth < search_depth && !frontier.empty(); ++depth) {
                    std::vector<std::uint32_t> next;
                    for (auto c : frontier) {
                        for (auto v2 : cv[c]) {
                            if (var_mark[v2] == stamp) {
                                continue;
                            }
                            var_mark[v2] = stamp;
                            for (auto c2 : vc[v2]) {
                                if (check_mark[c2] != stamp) {
                                    check_mark[c2] = stamp;
                                    next.push_back(c2);
                                }
                            }
                        }
                    }
                    if (!next.empty()) {
                        layers.push_back(next);
                    }
                    frontier = std::move(next);
                }
                for (std::size_t c = 0; c < m; ++c) {
                    if (check_mark[c] != stamp && free_sockets[c] > 0) {
                        candidates.push_back(static_cast<std::uint32_t>(c));
                    }
                }
                // Everything reachable: take the deepest layer that still has sockets.
                for (std::size_t l = layers.size(); candidates.empty() && l > 1; --l) {
                    for (auto c : layers[l - 1]) {
                        if (free_sockets[c] > 0) {
                            candidates.push_back(c);
                        }
                    }
                }
            }
            if (candidates.empty()) {
                for (std::size_t c = 0; c < m; ++c) {
                    if (free_sockets[c] > 0 && std::find(vc[v].begin(), vc[v].end(), c) == vc[v].end()) {
                        candidates.push_back(static_cast<std::uint32_t>(c));
                    }
                }
            }
            if (candidates.empty()) {
                // Sockets left only on checks already adjacent to v: open one elsewhere.
                for (std::size_t c = 0; c < m; ++c) {
                    if (std::find(vc[v].begin(), vc[v].end(), c) == vc[v].end()) {
                        candidates.push_back(static_cast<std::uint32_t>(c));
                    }
                }
                if (candidates.empty()) {
                    throw ConstructionError("construct_code: cannot place edge without duplication");
                }
                const auto c = pick(candidates);
                ++free_sockets[c];
                candidates.assign(1, c);
            }
            const auto c = pick(candidates);
            --free_sockets[c];
            cv[c].push_back(static_cast<std::uint32_t>(v));
            vc[v].push_back(c);
        }
    }
    remove_four_cycles(cv, vc, rng);
    // Drop checks that ended up empty (only possible for tiny n).
    cv.erase(std::remove_if(cv.begin(), cv.end(), [](const auto& r) { return r.empty(); }), cv.end());
    std::ostringstream name;
    name << "peg-n" << n << "-s" << seed;
    return LdpcCode(n, std::move(cv), name.str());
}

void write_alist(std::ostream& os, const LdpcCode& code) {
    const auto& vc = code.var_checks();
    const auto& cv = code.check_vars();
    std::size_t max_col = 0;
    std::size_t max_row = 0;
    for (const auto& c : vc) {
        max_col = std::max(max_col, c.size());
    }
    for (const auto& r : cv) {
        max_row = std::max(max_row, r.size());
    }
    os << code.n() << ' ' << code.checks() << '\n' << max_col << ' ' << max_row << '\n';
    for (std::size_t v = 0; v < vc.size(); ++v) {
        os << (v ? " " : "") << vc[v].size();
    }
    os << '\n';
    for (std::size_t c = 0; c < cv.size(); ++c) {
        os << (c ? " " : "") << cv[c].size();
    }
    os << '\n';
    auto emit = [&](const std::vector<std::uint32_t>& list, std::size_t width) {
        for (std::size_t i = 0; i < width; ++i) {
            os << (i ? " " : "") << (i < list.size() ? list[i] + 1 : 0);
        }
        os << '\n';
    };
    for (const auto& c : vc) {
        emit(c, max_col);
    }
    for (const auto& r : cv) {
        emit(r, max_row);
    }
}

LdpcCode read_alist(std::istream& is, std::string name) {
    std::vector<std::vector<long long>> lines;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::vector<long long> vals;
        long long x = 0;
        while (ls >> x) {
            vals.push_back(x);
        }
        if (!ls.eof()) {
            throw std::runtime_error("alist: non-numeric token in line '" + line + "'");
        }
        if (!vals.empty()) {
            lines.push_back(std::move(vals));
        }
    }
    if (lines.size() < 4 || lines[0].size() != 2 || lines[1].size() != 2) {
        throw std::runtime_error("alist: malformed header");
    }
    const auto n = static_cast<std::size_t>(lines[0][0]);
    const auto m = static_cast<std::size_t>(lines[0][1]);
    if (lines[2].size() != n || lines[3].size() != m || lines.size() != 4 + n + m) {
        throw std::runtime_error("alist: expected " + std::to_string(n) + " column and " + std::to_string(m) +
                                 " row lists");
    }
    // Lists may be zero padded up to the maximum weight; zeros are skipped.
    auto parse_list = [](const std::vector<long long>& raw, long long weight, std::size_t bound,
                         const std::string& what) {
        std::vector<std::uint32_t> out;
        for (long long x : raw) {
            if (x == 0) {
                continue;
            }
            if (x < 0 || static_cast<std::size_t>(x) > bound) {
                throw std::runtime_error("alist: index out of range in " + what);
            }
            out.push_back(static_cast<std::uint32_t>(x - 1));
        }
        if (static_cast<long long>(out.size()) != weight) {
            throw std::runtime_error("alist: weight mismatch in " + what);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    std::vector<std::vector<std::uint32_t>> vc(n);
    for (std::size_t v = 0; v < n; ++v) {
        vc[v] = parse_list(lines[4 + v], lines[2][v], m, "variable " + std::to_string(v + 1));
    }
    std::vector<std::vector<std::uint32_t>> cv(m);
    for (std::size_t c = 0; c < m; ++c) {
        cv[c] = parse_list(lines[4 + n + c], lines[3][c], n, "check " + std::to_string(c + 1));
    }
    std::size_t from_cols = 0;
    for (std::size_t v = 0; v < n; ++v) {
        for (auto c : vc[v]) {
            if (!std::binary_search(cv[c].begin(), cv[c].end(), static_cast<std::uint32_t>(v))) {
                throw std::runtime_error("alist: column and row lists disagree at variable " + std::to_string(v + 1));
            }
        }
        from_cols += vc[v].size();
    }
    std::size_t from_rows = 0;
    for (const auto& r : cv) {
        from_rows += r.size();
    }
    if (from_cols != from_rows) {
        throw std::runtime_error("alist: column and row edge counts differ");
    }
    return LdpcCode(n, std::move(cv), std::move(name));
}

LdpcCode load_alist(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open alist file " + path);
    }
    auto slash = path.find_last_of('/');
    auto base = path.substr(slash == std::string::npos ? 0 : slash + 1);
    return read_alist(is, base);
}

void save_alist(const std::string& path, const LdpcCode& code) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write " + path);
    }
    write_alist(os, code);
}

} // namespace mamp
