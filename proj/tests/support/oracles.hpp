#pragma once

// Reference computations used only by tests. They deliberately avoid the
// library's code paths (no prefix sums, no Simpson) so that they can check it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace wvar::oracle {

/// Lower quantile by enumerating P(X <= x) over the distinct atoms:
/// the smallest atom whose cumulative mass strictly exceeds s.
inline double quantile_by_enumeration(std::vector<double> x, double s) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        // mass of {X <= x_i} counts ties
        std::size_t j = i;
        while (j + 1 < x.size() && x[j + 1] == x[i]) ++j;
        // compare counts to avoid rounding in count/n > s
        if (static_cast<double>(j + 1) > s * n) return x[i];
        i = j;
    }
    return x.back();
}

/// Tail V@R as the average of the worst `level` fraction of outcomes, with a
/// fractional share of the boundary atom, computed atom by atom.
inline double tail_var_by_sorting(std::vector<double> x, double level) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double remaining = level;
    double integral = 0.0;
    for (const double v : x) {
        const double mass = std::min(1.0 / n, remaining);
        if (mass <= 0.0) break;
        integral += mass * v;
        remaining -= mass;
    }
    return -integral / level;
}

/// Uniform Weighted-V@R by brute-force double integration: midpoint rule in s
/// for the inner quantile integral, then the average over level of the
/// running tail mean.
inline double weighted_var_double_integral(std::vector<double> x, std::size_t cells) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double running = 0.0;
    double outer = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const double s = (static_cast<double>(i) + 0.5) / static_cast<double>(cells);
        const auto k = std::min(static_cast<std::size_t>(std::floor(n * s)), x.size() - 1);
        running += x[k] / static_cast<double>(cells);
        const double level = static_cast<double>(i + 1) / static_cast<double>(cells);
        outer += -running / level;
    }
    return outer / static_cast<double>(cells);
}

/// Euclidean simplex projection by bisection on the threshold.
inline std::vector<double> simplex_projection_bisection(const std::vector<double>& v) {
    double lo = *std::min_element(v.begin(), v.end()) - 1.0;
    double hi = *std::max_element(v.begin(), v.end());
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double total = 0.0;
        for (const double x : v) total += std::max(x - mid, 0.0);
        (total > 1.0 ? lo : hi) = mid;
    }
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - 0.5 * (lo + hi), 0.0);
    return out;
}

}  // namespace wvar::oracle
