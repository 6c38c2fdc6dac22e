#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "wvar/market_data.hpp"
#include "wvar/risk_measures.hpp"

namespace wvar {

enum class MeasureName { var, tvar, wvar };

std::string_view to_string(MeasureName name) noexcept;

struct BacktestResult {
    MeasureName measure = MeasureName::var;
    std::size_t total_tests = 0;
    std::size_t failures = 0;
    double failure_rate = 0.0;
    std::vector<Date> failure_dates;
};

/// Per-window estimates, kept so callers can inspect what was compared.
struct BacktestTrace {
    Date date;
    double realized_loss;
    double var;
    double tvar;
    double wvar;
};

struct ReviewTest {
    std::vector<BacktestResult> results;  // var, tvar, wvar in that order
    std::vector<BacktestTrace> trace;
};

/// Rolls `spec` through the series, estimates each measure on the in-sample
/// returns and counts a failure whenever the next realized loss strictly
/// exceeds the estimate.
ReviewTest run_review_test(const ReturnSeries& series, const WindowSpec& spec, double level,
                           const WeightingMeasure& measure,
                           std::size_t outer_panels = kDefaultOuterPanels);

enum class Verdict { risk_estimated_high, consistent, risk_estimated_low };

std::string_view to_string(Verdict verdict) noexcept;

/// Failure counts that are compatible with the nominal level: the two-sided
/// central band of Binomial(trials, level) at `confidence`.
struct BinomialBand {
    std::size_t lower;
    std::size_t upper;
};

BinomialBand binomial_band(std::size_t trials, double level, double confidence);

/// Binomial(trials, p) CDF at k.
double binomial_cdf(std::size_t k, std::size_t trials, double p);

/// Failures below the band mean the measure overstates risk, above it that it
/// understates risk. With confidence = 0 the band collapses and the verdict is
/// the plain comparison of failure_rate with level.
Verdict classify_result(const BacktestResult& result, double level, double confidence = 0.95);

}  // namespace wvar
