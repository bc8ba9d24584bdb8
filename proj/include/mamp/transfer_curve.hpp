#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mamp {

enum class Monotonicity { nonincreasing, nondecreasing, none };

/// A sampled scalar transfer function (rho -> mmse, or v -> rho).
///
/// Evaluation interpolates linearly between samples and clamps to the end
/// values outside the sampled range.
class TransferCurve {
public:
    TransferCurve() = default;
    TransferCurve(std::vector<double> x, std::vector<double> y,
                  Monotonicity direction = Monotonicity::nonincreasing,
                  std::vector<double> stderrs = {});

    static TransferCurve sample(const std::function<double(double)>& f, const std::vector<double>& grid,
                                Monotonicity direction = Monotonicity::nonincreasing);

    const std::vector<double>& x() const noexcept { return x_; }
    const std::vector<double>& y() const noexcept { return y_; }
    /// Per-sample standard errors; empty for deterministic curves.
    const std::vector<double>& stderrs() const noexcept { return stderr_; }
    Monotonicity direction() const noexcept { return direction_; }
    std::size_t size() const noexcept { return x_.size(); }
    bool empty() const noexcept { return x_.empty(); }
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    double operator()(double at) const;

    /// Smallest abscissa at which the curve reaches `level` (monotone curves).
    /// Returns x_max() if the level is never reached.
    double first_crossing(double level) const;

    /// True if the ordinates respect the declared direction within `tol`
    /// (plus 3 standard errors when they are attached).
    bool is_monotone(double tol = 0.0) const;

    /// Pool-adjacent-violators fit in the declared direction. Removes
    /// Monte Carlo jitter from measured curves.
    TransferCurve monotone_smoothed() const;

    /// Integral of the piecewise-linear interpolant over [a, b].
    double integrate(double a, double b) const;

    void write_csv(std::ostream& os, const std::string& x_name = "x", const std::string& y_name = "y") const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> stderr_;
    Monotonicity direction_ = Monotonicity::nonincreasing;
};

std::vector<double> log_grid(double lo, double hi, std::size_t points);
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

} // namespace mamp
