#include "mamp/transfer_curve.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mamp {

TransferCurve::TransferCurve(std::vector<double> x, std::vector<double> y, Monotonicity direction,
                             std::vector<double> stderrs)
    : x_(std::move(x)), y_(std::move(y)), stderr_(std::move(stderrs)), direction_(direction) {
    if (x_.empty() || x_.size() != y_.size()) {
        throw std::invalid_argument("TransferCurve: need matching, nonempty abscissa/ordinate lists");
    }
    if (!stderr_.empty() && stderr_.size() != x_.size()) {
        throw std::invalid_argument("TransferCurve: stderr list length mismatch");
    }
    for (std::size_t i = 1; i < x_.size(); ++i) {
        if (!(x_[i] > x_[i - 1])) {
            throw std::invalid_argument("TransferCurve: abscissas must be strictly ascending");
        }
    }
}

TransferCurve TransferCurve::sample(const std::function<double(double)>& f, const std::vector<double>& grid,
                                    Monotonicity direction) {
    std::vector<double> y(grid.size());
    std::transform(grid.begin(), grid.end(), y.begin(), f);
    return TransferCurve(grid, std::move(y), direction);
}

double TransferCurve::operator()(double at) const {
    if (at <= x_.front()) {
        return y_.front();
    }
    if (at >= x_.back()) {
        return y_.back();
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), at);
    const auto hi = static_cast<std::size_t>(it - x_.begin());
    const auto lo = hi - 1;
    const double t = (at - x_[lo]) / (x_[hi] - x_[lo]);
    return y_[lo] + t * (y_[hi] - y_[lo]);
}

double TransferCurve::first_crossing(double level) const {
    const bool falling = direction_ != Monotonicity::nondecreasing;
    auto reached = [&](double v) { return falling ? v <= level : v >= level; };
    if (reached(y_.front())) {
        return x_.front();
    }
    for (std::size_t i = 1; i < x_.size(); ++i) {
        if (reached(y_[i])) {
            const double dy = y_[i] - y_[i - 1];
            const double t = dy != 0.0 ? (level - y_[i - 1]) / dy : 1.0;
            return x_[i - 1] + std::clamp(t, 0.0, 1.0) * (x_[i] - x_[i - 1]);
        }
    }
    return x_.back();
}

bool TransferCurve::is_monotone(double tol) const {
    if (direction_ == Monotonicity::none) {
        return true;
    }
    const double sign = direction_ == Monotonicity::nonincreasing ? 1.0 : -1.0;
    for (std::size_t i = 1; i < y_.size(); ++i) {
        double slack = tol;
        if (!stderr_.empty()) {
            slack += 3.0 * std::hypot(stderr_[i], stderr_[i - 1]);
        }
        if (sign * (y_[i] - y_[i - 1]) > slack) {
            return false;
        }
    }
    return true;
}

TransferCurve TransferCurve::monotone_smoothed() const {
    if (direction_ == Monotonicity::none) {
        return *this;
    }
    // Pool adjacent violators on the sign-flipped sequence so we always fit a
    // nondecreasing sequence.
    const double sign = direction_ == Monotonicity::nonincreasing ? -1.0 : 1.0;
    struct Block {
        double sum;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (double v : y_) {
        blocks.push_back({sign * v, 1.0, 1});
        while (blocks.size() > 1) {
            auto& b = blocks[blocks.size() - 1];
            auto& a = blocks[blocks.size() - 2];
            if (a.sum / a.weight <= b.sum / b.weight) {
                break;
            }
            a.sum += b.sum;
            a.weight += b.weight;
            a.count += b.count;
            blocks.pop_back();
        }
    }
    std::vector<double> fitted;
    fitted.reserve(y_.size());
    for (const auto& b : blocks) {
        fitted.insert(fitted.end(), b.count, sign * b.sum / b.weight);
    }
    return TransferCurve(x_, std::move(fitted), direction_, stderr_);
}

double TransferCurve::integrate(double a, double b) const {
    if (b < a) {
        return -integrate(b, a);
    }
    // Knots inside (a, b) plus the clamped end segments.
    std::vector<double> knots{a};
    for (double xi : x_) {
        if (xi > a && xi < b) {
            knots.push_back(xi);
        }
    }
    knots.push_back(b);
    double sum = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        sum += 0.5 * (knots[i] - knots[i - 1]) * ((*this)(knots[i]) + (*this)(knots[i - 1]));
    }
    return sum;
}

void TransferCurve::write_csv(std::ostream& os, const std::string& x_name, const std::string& y_name) const {
    os << x_name << ',' << y_name << '\n';
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < x_.size(); ++i) {
        os << x_[i] << ',' << y_[i] << '\n';
    }
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw std::invalid_argument("log_grid: need 0 < lo < hi and at least two points");
    }
    std::vector<double> g(points);
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = std::exp(a + step * static_cast<double>(i));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (!(hi > lo) || points < 2) {
        throw std::invalid_argument("linear_grid: need lo < hi and at least two points");
    }
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return g;
}

} // namespace mamp
