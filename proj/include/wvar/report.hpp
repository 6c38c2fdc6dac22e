#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "wvar/backtest.hpp"
#include "wvar/portfolio.hpp"
#include "wvar/rebalance.hpp"
#include "wvar/risk_measures.hpp"

namespace wvar {

/// Quadrature and sign settings embedded in every JSON report.
struct Convention {
    WeightingMeasure measure;
    std::size_t inner_panels = kDefaultInnerPanels;
    std::size_t outer_panels = kDefaultOuterPanels;
};

nlohmann::json to_json(const Convention& convention);
nlohmann::json to_json(const RiskReport& report);
nlohmann::json to_json(const BacktestResult& result, double level, double band_confidence);
nlohmann::json to_json(const PortfolioSolution& solution);
nlohmann::json to_json(const PerformanceReport& report);
nlohmann::json to_json(const ComparisonRow& row);

/// The comparison table as CSV: per bucket a "Mean" row and a "WV@R" row
/// with one column per strategy.
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

/// Shortest round-trip decimal rendering.
std::string format_number(double value);

}  // namespace wvar
