#pragma once

#include <vector>

namespace mamp {

enum class ConstraintKind { le, ge, eq };

struct LinearConstraint {
    std::vector<double> coeffs;
    ConstraintKind kind = ConstraintKind::le;
    double rhs = 0.0;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

/// maximize c^T x subject to the constraints and x >= 0. Dense two-phase
/// tableau simplex with Bland's anti-cycling rule; meant for small problems.
LpResult solve_lp(const std::vector<double>& objective, const std::vector<LinearConstraint>& constraints,
                  double tol = 1e-10);

} // namespace mamp
