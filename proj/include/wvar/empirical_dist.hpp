#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wvar {

/// Historical-simulation return law: a sorted sample with equal atom masses.
///
/// The lower quantile follows q(s) = inf{x : P(X <= x) > s}, which for n
/// atoms is the order statistic x_(floor(n*s) + 1). At atom boundaries this
/// takes the right-continuous branch. Ties are kept.
class EmpiricalDistribution {
public:
    /// Throws InvalidArgument on empty input and DataError on nonfinite samples.
    static EmpiricalDistribution from_samples(std::span<const double> samples);

    std::span<const double> sorted_samples() const noexcept { return sorted_; }
    std::size_t size() const noexcept { return sorted_.size(); }

    /// Order statistic for s in [0, 1).
    double quantile(double s) const;
    /// Same as quantile() but accepts s = 1 and returns the maximum there.
    double quantile_closed(double s) const;

    double min() const noexcept { return sorted_.front(); }
    double max() const noexcept { return sorted_.back(); }
    double mean() const noexcept { return prefix_.back() / static_cast<double>(sorted_.size()); }
    double range() const noexcept { return max() - min(); }

    /// Integral of q(s) over [0, level], evaluated exactly on the step function.
    double lower_partial_integral(double level) const;

private:
    explicit EmpiricalDistribution(std::vector<double> sorted);

    std::vector<double> sorted_;
    // prefix_[k] = sum of the k smallest samples.
    std::vector<double> prefix_;
};

}  // namespace wvar
