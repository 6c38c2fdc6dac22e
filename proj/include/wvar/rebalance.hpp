#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wvar/market_data.hpp"
#include "wvar/risk_measures.hpp"

namespace wvar {

enum class Strategy { mean_wvar_quadratic, mean_variance };

std::string_view to_string(Strategy strategy) noexcept;

struct StrategySpec {
    Strategy method = Strategy::mean_wvar_quadratic;
    double risk_aversion = 1.0;
    double penalty = 1e12;
    WeightingMeasure measure = WeightingMeasure::uniform();
    int variance_power = 2;
    std::size_t outer_panels = kDefaultOuterPanels;
    /// Minimum number of in-sample observations before the first month.
    std::size_t min_history = 20;
};

struct MonthlyWeights {
    std::chrono::year_month month;
    std::vector<double> weights;
};

struct PerformanceReport {
    StrategySpec strategy;
    std::vector<std::string> asset_ids;
    double oos_mean = 0.0;
    double oos_wvar = 0.0;
    std::vector<MonthlyWeights> monthly_weights;
    std::vector<ReturnObservation> portfolio_returns;
    /// Months where the stationary point was a saddle (quadratic method only).
    std::size_t saddle_months = 0;
};

/// Monthly-rebalanced backtest. For every calendar month at or after
/// `evaluation_start`, inputs are estimated on all observations strictly
/// before the month, the strategy is solved, the weights are projected onto
/// the simplex and held fixed for each day of the month.
PerformanceReport run_rebalance(std::span<const ReturnSeries> series, const StrategySpec& strategy,
                                Date evaluation_start);

/// Weights chosen for a month given only the in-sample history before it.
std::vector<double> monthly_allocation(std::span<const ReturnSeries> series,
                                       const StrategySpec& strategy, std::size_t in_sample_end);

enum class Winner { mean_wvar, mean_variance, tie };

std::string_view to_string(Winner winner) noexcept;

struct ComparisonRow {
    std::string bucket;
    double risk_aversion_wvar = 0.0;
    double risk_aversion_mv = 0.0;
    double mean_wvar_mean = 0.0;
    double mean_variance_mean = 0.0;
    double mean_wvar_risk = 0.0;
    double mean_variance_risk = 0.0;
    Winner higher_mean = Winner::tie;
    Winner lower_wvar = Winner::tie;
};

/// Pairs Mean-WV@R and Mean-Variance reports by rank of risk aversion. The
/// smallest risk aversion is labelled "High Risk", then "Middle Risk",
/// "Low Risk", "Very Low Risk"; further buckets are numbered.
std::vector<ComparisonRow> compare_strategies(std::span<const PerformanceReport> reports);

std::string bucket_label(std::size_t rank);

}  // namespace wvar
