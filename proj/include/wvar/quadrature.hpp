#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>

#include "wvar/error.hpp"

namespace wvar {

/// Uniform grid for composite Simpson: n = 2m subintervals of [a, b].
class SimpsonGrid {
public:
    SimpsonGrid(double a, double b, std::size_t n) : a_(a), b_(b), n_(n) {
        if (n == 0 || n % 2 != 0) {
            throw InvalidArgument("quadrature", "Simpson grid needs an even positive number of "
                                                "subintervals, got " + std::to_string(n));
        }
        if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
            throw InvalidArgument("quadrature", "Simpson grid needs finite limits with a < b");
        }
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    std::size_t intervals() const noexcept { return n_; }
    double step() const noexcept { return (b_ - a_) / static_cast<double>(n_); }

    /// x_k = a + k h; the last node is pinned to b.
    double node(std::size_t k) const noexcept {
        if (k == n_) return b_;
        return a_ + static_cast<double>(k) * (b_ - a_) / static_cast<double>(n_);
    }

private:
    double a_;
    double b_;
    std::size_t n_;
};

namespace detail {

template <std::invocable<double> F>
double eval_finite(F& f, double x) {
    const double y = static_cast<double>(f(x));
    if (!std::isfinite(y)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "integrand is not finite at node x = " << x;
        throw NumericalError("quadrature", msg.str());
    }
    return y;
}

}  // namespace detail

/// (h/3) [f(a) + f(b) + 4 sum f(odd nodes) + 2 sum f(interior even nodes)].
template <std::invocable<double> F>
double composite_simpson(F&& f, const SimpsonGrid& grid) {
    const std::size_t n = grid.intervals();
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double y = detail::eval_finite(f, grid.node(k));
        (k % 2 == 1 ? odd : even) += y;
    }
    const double ends = detail::eval_finite(f, grid.a()) + detail::eval_finite(f, grid.b());
    return grid.step() / 3.0 * (ends + 4.0 * odd + 2.0 * even);
}

/// Panel form: sum over n panels of (h/6)[f(x_k) + 4 f(x_{k+1/2}) + f(x_{k+1})]
/// with h = (b - a) / n. Shares its nodes with composite_simpson on 2n subintervals.
template <std::invocable<double> F>
double half_node_simpson(F&& f, double a, double b, std::size_t panels) {
    if (panels == 0) {
        throw InvalidArgument("quadrature", "half-node Simpson needs at least one panel");
    }
    const SimpsonGrid fine(a, b, 2 * panels);
    double mids = 0.0;
    double interior = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
        mids += detail::eval_finite(f, fine.node(2 * k + 1));
        if (k > 0) interior += detail::eval_finite(f, fine.node(2 * k));
    }
    const double h = (b - a) / static_cast<double>(panels);
    return h / 6.0 *
           (detail::eval_finite(f, a) + 4.0 * mids + 2.0 * interior + detail::eval_finite(f, b));
}

/// Composite Simpson over values already sampled on the uniform grid of
/// [a, b]; needs an odd number of samples (>= 3).
inline double simpson_on_samples(std::span<const double> values, double a, double b) {
    if (values.size() < 3) {
        throw InvalidArgument("quadrature", "Simpson on samples needs at least 3 values");
    }
    const SimpsonGrid grid(a, b, values.size() - 1);
    const std::size_t n = grid.intervals();
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        if (!std::isfinite(values[k])) {
            throw NumericalError("quadrature", "sample " + std::to_string(k) + " is not finite");
        }
        if (k > 0 && k < n) (k % 2 == 1 ? odd : even) += values[k];
    }
    return grid.step() / 3.0 * (values[0] + values[n] + 4.0 * odd + 2.0 * even);
}

}  // namespace wvar
