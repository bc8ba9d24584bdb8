#include "mamp/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mamp {

namespace {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    // Row `rows_` holds the reduced costs (objective row).
    double& cost(std::size_t c) { return at(rows_, c); }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) {
            at(pr, c) *= inv;
        }
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) {
                continue;
            }
            const double f = at(r, pc);
            if (f == 0.0) {
                continue;
            }
            for (std::size_t c = 0; c <= cols_; ++c) {
                at(r, c) -= f * at(pr, c);
            }
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> a_;
};

// Runs simplex iterations maximizing the objective whose reduced costs are
// stored as -c in the cost row. Columns marked in `blocked` never enter.
LpStatus iterate(Tableau& t, std::vector<std::size_t>& basis, const std::vector<char>& blocked, double tol) {
    for (std::size_t guard = 0; guard < 100000; ++guard) {
        std::size_t enter = t.cols();
        for (std::size_t c = 0; c < t.cols(); ++c) {
            if (!blocked[c] && t.cost(c) < -tol) {
                enter = c; // Bland: lowest index
                break;
            }
        }
        if (enter == t.cols()) {
            return LpStatus::optimal;
        }
        std::size_t leave = t.rows();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const double a = t.at(r, enter);
            if (a > tol) {
                const double ratio = t.rhs(r) / a;
                if (leave == t.rows() || ratio < best - tol || (std::abs(ratio - best) <= tol && basis[r] < basis[leave])) {
                    best = ratio;
                    leave = r;
                }
            }
        }
        if (leave == t.rows()) {
            return LpStatus::unbounded;
        }
        t.pivot(leave, enter);
        basis[leave] = enter;
    }
    throw std::runtime_error("solve_lp: iteration limit reached");
}

} // namespace

LpResult solve_lp(const std::vector<double>& objective, const std::vector<LinearConstraint>& constraints,
                  double tol) {
    const std::size_t n = objective.size();
    const std::size_t m = constraints.size();
    std::size_t slacks = 0;
    std::size_t artificials = 0;
    for (const auto& con : constraints) {
        if (con.coeffs.size() != n) {
            throw std::invalid_argument("solve_lp: constraint width mismatch");
        }
        const bool flip = con.rhs < 0.0;
        auto kind = con.kind;
        if (flip && kind != ConstraintKind::eq) {
            kind = kind == ConstraintKind::le ? ConstraintKind::ge : ConstraintKind::le;
        }
        slacks += kind != ConstraintKind::eq;
        artificials += kind != ConstraintKind::le;
    }
    const std::size_t cols = n + slacks + artificials;
    Tableau t(m, cols);
    std::vector<std::size_t> basis(m);
    std::vector<char> is_artificial(cols, 0);
    std::size_t next_slack = n;
    std::size_t next_art = n + slacks;
    for (std::size_t r = 0; r < m; ++r) {
        const auto& con = constraints[r];
        const double sign = con.rhs < 0.0 ? -1.0 : 1.0;
        auto kind = con.kind;
        if (sign < 0 && kind != ConstraintKind::eq) {
            kind = kind == ConstraintKind::le ? ConstraintKind::ge : ConstraintKind::le;
        }
        for (std::size_t j = 0; j < n; ++j) {
            t.at(r, j) = sign * con.coeffs[j];
        }
        t.rhs(r) = sign * con.rhs;
        if (kind == ConstraintKind::le) {
            t.at(r, next_slack) = 1.0;
            basis[r] = next_slack++;
        } else {
            if (kind == ConstraintKind::ge) {
                t.at(r, next_slack++) = -1.0;
            }
            t.at(r, next_art) = 1.0;
            is_artificial[next_art] = 1;
            basis[r] = next_art++;
        }
    }
    std::vector<char> blocked(cols, 0);
    LpResult result;
    if (artificials > 0) {
        // Phase 1: maximize -(sum of artificials).
        for (std::size_t c = 0; c <= cols; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                if (is_artificial[basis[r]]) {
                    s += t.at(r, c);
                }
            }
            t.cost(c) = c < cols && is_artificial[c] ? 0.0 : -s;
        }
        iterate(t, basis, blocked, tol);
        if (-t.cost(cols) > 1e-8 * std::max(1.0, static_cast<double>(m))) {
            return result;
        }
        // Drive remaining artificial variables out of the basis where possible.
        for (std::size_t r = 0; r < m; ++r) {
            if (!is_artificial[basis[r]]) {
                continue;
            }
            for (std::size_t c = 0; c < cols; ++c) {
                if (!is_artificial[c] && std::abs(t.at(r, c)) > tol) {
                    t.pivot(r, c);
                    basis[r] = c;
                    break;
                }
            }
        }
        for (std::size_t c = 0; c < cols; ++c) {
            blocked[c] = is_artificial[c];
        }
    }
    // Phase 2 cost row: -c expressed in the current basis.
    for (std::size_t c = 0; c <= cols; ++c) {
        t.cost(c) = c < n ? -objective[c] : 0.0;
    }
    for (std::size_t r = 0; r < m; ++r) {
        const double f = t.cost(basis[r]);
        if (f != 0.0) {
            for (std::size_t c = 0; c <= cols; ++c) {
                t.cost(c) -= f * t.at(r, c);
            }
        }
    }
    const auto status = iterate(t, basis, blocked, tol);
    result.status = status;
    if (status != LpStatus::optimal) {
        return result;
    }
    result.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        if (basis[r] < n) {
            result.x[basis[r]] = t.rhs(r);
        }
    }
    result.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        result.objective += objective[j] * result.x[j];
    }
    return result;
}

} // namespace mamp
