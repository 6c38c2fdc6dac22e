#include "wvar/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wvar/error.hpp"

namespace wvar {
namespace {
constexpr const char* kModule = "backtest";

double log_binomial_pmf(std::size_t i, std::size_t n, double p) {
    const double ni = static_cast<double>(n);
    const double ii = static_cast<double>(i);
    return std::lgamma(ni + 1.0) - std::lgamma(ii + 1.0) - std::lgamma(ni - ii + 1.0) +
           ii * std::log(p) + (ni - ii) * std::log1p(-p);
}
}  // namespace

std::string_view to_string(MeasureName name) noexcept {
    switch (name) {
        case MeasureName::var: return "var";
        case MeasureName::tvar: return "tvar";
        case MeasureName::wvar: return "wvar";
    }
    return "unknown";
}

std::string_view to_string(Verdict verdict) noexcept {
    switch (verdict) {
        case Verdict::risk_estimated_high: return "risk estimated high";
        case Verdict::consistent: return "consistent";
        case Verdict::risk_estimated_low: return "risk estimated low";
    }
    return "unknown";
}

ReviewTest run_review_test(const ReturnSeries& series, const WindowSpec& spec, double level,
                           const WeightingMeasure& measure, std::size_t outer_panels) {
    validate_level_open(level);
    measure.validate();
    const auto ws = windows(series, spec);

    ReviewTest out;
    out.results.resize(3);
    out.results[0].measure = MeasureName::var;
    out.results[1].measure = MeasureName::tvar;
    out.results[2].measure = MeasureName::wvar;
    out.trace.reserve(ws.size());
    std::vector<double> sample;
    for (const auto& w : ws) {
        sample = values_of(w.in_sample);
        const auto dist = EmpiricalDistribution::from_samples(sample);
        const BacktestTrace t{w.next.date, -w.next.value, value_at_risk(dist, level),
                              tail_var_exact(dist, level), weighted_var(dist, measure, outer_panels)};
        const double estimates[] = {t.var, t.tvar, t.wvar};
        for (std::size_t m = 0; m < 3; ++m) {
            auto& r = out.results[m];
            ++r.total_tests;
            if (t.realized_loss > estimates[m]) {
                ++r.failures;
                r.failure_dates.push_back(t.date);
            }
        }
        out.trace.push_back(t);
    }
    for (auto& r : out.results) {
        r.failure_rate = static_cast<double>(r.failures) / static_cast<double>(r.total_tests);
    }
    return out;
}

double binomial_cdf(std::size_t k, std::size_t trials, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument(kModule, "binomial probability must lie in [0, 1]");
    }
    if (k >= trials) return 1.0;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i <= k; ++i) total += std::exp(log_binomial_pmf(i, trials, p));
    return std::min(total, 1.0);
}

BinomialBand binomial_band(std::size_t trials, double level, double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw InvalidArgument(kModule, "band confidence must lie in (0, 1)");
    }
    const double tail = (1.0 - confidence) / 2.0;
    BinomialBand band{0, trials};
    // lower: smallest k with P(X <= k) >= tail.
    while (band.lower < trials && binomial_cdf(band.lower, trials, level) < tail) ++band.lower;
    // upper: largest k with P(X >= k) >= tail.
    while (band.upper > 0 && 1.0 - binomial_cdf(band.upper - 1, trials, level) < tail) --band.upper;
    return band;
}

Verdict classify_result(const BacktestResult& result, double level, double confidence) {
    if (result.total_tests == 0) {
        throw InvalidArgument(kModule, "cannot classify a backtest with no tests");
    }
    validate_level_open(level);
    if (confidence == 0.0) {
        if (result.failure_rate < level) return Verdict::risk_estimated_high;
        if (result.failure_rate > level) return Verdict::risk_estimated_low;
        return Verdict::consistent;
    }
    const auto band = binomial_band(result.total_tests, level, confidence);
    if (result.failures < band.lower) return Verdict::risk_estimated_high;
    if (result.failures > band.upper) return Verdict::risk_estimated_low;
    return Verdict::consistent;
}

}  // namespace wvar
