#include "wvar/empirical_dist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wvar/error.hpp"

namespace wvar {
namespace {
constexpr const char* kModule = "empirical_dist";
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> sorted)
    : sorted_(std::move(sorted)), prefix_(sorted_.size() + 1, 0.0) {
    for (std::size_t k = 0; k < sorted_.size(); ++k) prefix_[k + 1] = prefix_[k] + sorted_[k];
}

EmpiricalDistribution EmpiricalDistribution::from_samples(std::span<const double> samples) {
    if (samples.empty()) {
        throw InvalidArgument(kModule, "an empirical distribution needs at least one sample");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (!std::isfinite(sorted[k])) {
            throw DataError(kModule, "sample " + std::to_string(k) + " is not finite");
        }
    }
    std::sort(sorted.begin(), sorted.end());
    return EmpiricalDistribution(std::move(sorted));
}

double EmpiricalDistribution::quantile(double s) const {
    if (!(s >= 0.0 && s < 1.0)) {
        throw InvalidArgument(kModule, "quantile level must lie in [0, 1), got " + std::to_string(s));
    }
    const auto n = sorted_.size();
    const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * s));
    return sorted_[std::min(k, n - 1)];
}

double EmpiricalDistribution::quantile_closed(double s) const {
    if (s == 1.0) return max();
    return quantile(s);
}

double EmpiricalDistribution::lower_partial_integral(double level) const {
    if (!(level >= 0.0 && level <= 1.0)) {
        throw InvalidArgument(kModule, "integration level must lie in [0, 1], got " +
                                           std::to_string(level));
    }
    const auto n = sorted_.size();
    const double nd = static_cast<double>(n);
    const auto full = std::min(static_cast<std::size_t>(std::floor(nd * level)), n);
    double integral = prefix_[full] / nd;
    if (full < n) {
        const double frac = std::max(0.0, level - static_cast<double>(full) / nd);
        integral += frac * sorted_[full];
    }
    return integral;
}

}  // namespace wvar
