#include "wvar/rebalance.hpp"

#include <algorithm>
#include <numeric>

#include "wvar/empirical_dist.hpp"
#include "wvar/error.hpp"
#include "wvar/portfolio.hpp"

namespace wvar {
namespace {

constexpr const char* kModule = "rebalance";

void validate_aligned(std::span<const ReturnSeries> series) {
    if (series.size() < 2) throw InvalidArgument(kModule, "rebalancing needs at least two assets");
    const auto& ref = series.front();
    for (const auto& s : series.subspan(1)) {
        if (s.size() != ref.size()) {
            throw DataError(kModule, "series '" + s.asset_id + "' has " + std::to_string(s.size()) +
                                         " returns but '" + ref.asset_id + "' has " +
                                         std::to_string(ref.size()));
        }
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (s.observations[k].date != ref.observations[k].date) {
                throw DataError(kModule, "series '" + s.asset_id + "' is misaligned at " +
                                             format_date(s.observations[k].date) + " (expected " +
                                             format_date(ref.observations[k].date) + ")");
            }
        }
    }
}

struct Allocation {
    std::vector<double> weights;
    bool saddle = false;
};

Allocation allocate(std::span<const ReturnSeries> series, const StrategySpec& strategy,
                    std::size_t end) {
    const auto n = series.size();
    std::vector<std::vector<double>> history(n);
    std::vector<double> means(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& obs = series[i].observations;
        history[i] = values_of(std::span(obs).first(end));
        means[i] = std::accumulate(history[i].begin(), history[i].end(), 0.0) / static_cast<double>(end);
    }
    const ScalarizationParams params{strategy.risk_aversion, strategy.penalty};
    if (strategy.method == Strategy::mean_wvar_quadratic) {
        std::vector<AssetProfile> profiles(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto dist = EmpiricalDistribution::from_samples(history[i]);
            profiles[i] = {series[i].asset_id, means[i],
                           weighted_var(dist, strategy.measure, strategy.outer_panels)};
        }
        const auto sol = solve_weighted_quadratic(profiles, params);
        return {sol.projected_weights, !sol.second_order_ok};
    }
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    const double denom = end > 1 ? static_cast<double>(end - 1) : 1.0;
    for (Eigen::Index a = 0; a < dim; ++a) {
        for (Eigen::Index b = a; b < dim; ++b) {
            double acc = 0.0;
            const auto& xa = history[static_cast<std::size_t>(a)];
            const auto& xb = history[static_cast<std::size_t>(b)];
            for (std::size_t k = 0; k < end; ++k) {
                acc += (xa[k] - means[static_cast<std::size_t>(a)]) * (xb[k] - means[static_cast<std::size_t>(b)]);
            }
            cov(a, b) = cov(b, a) = acc / denom;
        }
    }
    const auto sol = solve_mean_variance(means, cov, params, strategy.variance_power);
    return {sol.projected_weights, false};
}

}  // namespace

std::string_view to_string(Strategy strategy) noexcept {
    switch (strategy) {
        case Strategy::mean_wvar_quadratic: return "mean-wvar-quadratic";
        case Strategy::mean_variance: return "mean-variance";
    }
    return "unknown";
}

std::string_view to_string(Winner winner) noexcept {
    switch (winner) {
        case Winner::mean_wvar: return "mean-wvar";
        case Winner::mean_variance: return "mean-variance";
        case Winner::tie: return "tie";
    }
    return "unknown";
}

std::vector<double> monthly_allocation(std::span<const ReturnSeries> series,
                                       const StrategySpec& strategy, std::size_t in_sample_end) {
    validate_aligned(series);
    if (in_sample_end < 2 || in_sample_end > series.front().size()) {
        throw DataError(kModule, "in-sample history of " + std::to_string(in_sample_end) +
                                     " observations is unusable");
    }
    return allocate(series, strategy, in_sample_end).weights;
}

PerformanceReport run_rebalance(std::span<const ReturnSeries> series, const StrategySpec& strategy,
                                Date evaluation_start) {
    validate_aligned(series);
    strategy.measure.validate();
    const auto& dates = series.front().observations;
    const auto first = std::find_if(dates.begin(), dates.end(),
                                    [&](const ReturnObservation& o) { return o.date >= evaluation_start; });
    if (first == dates.end()) {
        throw DataError(kModule, "no observations on or after " + format_date(evaluation_start));
    }

    PerformanceReport report;
    report.strategy = strategy;
    for (const auto& s : series) report.asset_ids.push_back(s.asset_id);

    const auto n = series.size();
    auto start = static_cast<std::size_t>(first - dates.begin());
    while (start < dates.size()) {
        const std::chrono::year_month month{dates[start].date.year(), dates[start].date.month()};
        std::size_t stop = start;
        while (stop < dates.size() &&
               std::chrono::year_month{dates[stop].date.year(), dates[stop].date.month()} == month) {
            ++stop;
        }
        const std::size_t history = std::max<std::size_t>(strategy.min_history, 2);
        if (start < history) {
            throw DataError(kModule, "only " + std::to_string(start) + " observations before " +
                                         format_date(dates[start].date) + "; need at least " +
                                         std::to_string(history));
        }
        auto alloc = allocate(series, strategy, start);
        if (alloc.saddle) ++report.saddle_months;
        for (std::size_t k = start; k < stop; ++k) {
            double r = 0.0;
            for (std::size_t i = 0; i < n; ++i) r += alloc.weights[i] * series[i].observations[k].value;
            report.portfolio_returns.push_back({dates[k].date, r});
        }
        report.monthly_weights.push_back({month, std::move(alloc.weights)});
        start = stop;
    }

    const auto realized = values_of(report.portfolio_returns);
    report.oos_mean = std::accumulate(realized.begin(), realized.end(), 0.0) /
                      static_cast<double>(realized.size());
    report.oos_wvar = weighted_var(EmpiricalDistribution::from_samples(realized),
                                   WeightingMeasure::uniform(), strategy.outer_panels);
    return report;
}

std::string bucket_label(std::size_t rank) {
    static const char* const kLabels[] = {"High Risk", "Middle Risk", "Low Risk", "Very Low Risk"};
    if (rank < 4) return kLabels[rank];
    return "Risk Level " + std::to_string(rank + 1);
}

std::vector<ComparisonRow> compare_strategies(std::span<const PerformanceReport> reports) {
    std::vector<const PerformanceReport*> wvar_side;
    std::vector<const PerformanceReport*> mv_side;
    for (const auto& r : reports) {
        (r.strategy.method == Strategy::mean_wvar_quadratic ? wvar_side : mv_side).push_back(&r);
    }
    if (wvar_side.empty() || wvar_side.size() != mv_side.size()) {
        throw InvalidArgument(kModule, "comparison needs one Mean-WV@R and one Mean-Variance report per "
                                       "risk level; got " + std::to_string(wvar_side.size()) + " and " +
                                       std::to_string(mv_side.size()));
    }
    auto by_aversion = [](const PerformanceReport* a, const PerformanceReport* b) {
        return a->strategy.risk_aversion < b->strategy.risk_aversion;
    };
    std::stable_sort(wvar_side.begin(), wvar_side.end(), by_aversion);
    std::stable_sort(mv_side.begin(), mv_side.end(), by_aversion);

    auto winner = [](double wvar_value, double mv_value, bool larger_wins) {
        if (wvar_value == mv_value) return Winner::tie;
        return (wvar_value > mv_value) == larger_wins ? Winner::mean_wvar : Winner::mean_variance;
    };

    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < wvar_side.size(); ++i) {
        const auto& w = *wvar_side[i];
        const auto& v = *mv_side[i];
        ComparisonRow row;
        row.bucket = bucket_label(i);
        row.risk_aversion_wvar = w.strategy.risk_aversion;
        row.risk_aversion_mv = v.strategy.risk_aversion;
        row.mean_wvar_mean = w.oos_mean;
        row.mean_variance_mean = v.oos_mean;
        row.mean_wvar_risk = w.oos_wvar;
        row.mean_variance_risk = v.oos_wvar;
        row.higher_mean = winner(w.oos_mean, v.oos_mean, true);
        row.lower_wvar = winner(w.oos_wvar, v.oos_wvar, false);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace wvar
