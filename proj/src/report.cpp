#include "wvar/report.hpp"

#include <charconv>
#include <sstream>

namespace wvar {

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

nlohmann::json to_json(const Convention& convention) {
    return {
        {"sign", "loss-positive: positive values are losses"},
        {"quantile", "q(s) = inf{x : P(X <= x) > s} = x_(floor(n*s)+1), right-continuous at atoms"},
        {"tail_var", "exact piecewise integral of the empirical quantile"},
        {"weighted_var", "half-node Simpson over levels in [0,1], level-0 node = worst-case loss"},
        {"measure", convention.measure.describe()},
        {"inner_panels", convention.inner_panels},
        {"outer_panels", convention.outer_panels},
    };
}

nlohmann::json to_json(const RiskReport& report) {
    return {
        {"level", report.level},
        {"var", report.var},
        {"tvar", report.tvar},
        {"wvar", report.wvar},
        {"n_samples", report.n_samples},
        {"measure", report.measure.describe()},
    };
}

nlohmann::json to_json(const BacktestResult& result, double level, double band_confidence) {
    nlohmann::json dates = nlohmann::json::array();
    for (const auto d : result.failure_dates) dates.push_back(format_date(d));
    nlohmann::json out = {
        {"measure", to_string(result.measure)},
        {"total_tests", result.total_tests},
        {"failures", result.failures},
        {"failure_rate", result.failure_rate},
        {"failure_dates", dates},
    };
    if (result.total_tests > 0) {
        out["verdict"] = to_string(classify_result(result, level, band_confidence));
    }
    return out;
}

nlohmann::json to_json(const PortfolioSolution& solution) {
    return {
        {"method", to_string(solution.method)},
        {"weights", solution.weights},
        {"projected_weights", solution.projected_weights},
        {"objective_value", solution.objective_value},
        {"gradient_residual", solution.gradient_residual},
        {"budget_residual", solution.budget_residual},
        {"feasible", solution.feasible},
        {"second_order_ok", solution.second_order_ok},
        {"condition_estimate", solution.condition_estimate},
        {"rank_deficient", solution.rank_deficient},
    };
}

nlohmann::json to_json(const PerformanceReport& report) {
    nlohmann::json months = nlohmann::json::array();
    for (const auto& m : report.monthly_weights) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(m.month.year()),
                      static_cast<unsigned>(m.month.month()));
        months.push_back({{"month", buf}, {"weights", m.weights}});
    }
    return {
        {"strategy", to_string(report.strategy.method)},
        {"risk_aversion", report.strategy.risk_aversion},
        {"penalty", report.strategy.penalty},
        {"measure", report.strategy.measure.describe()},
        {"variance_power", report.strategy.variance_power},
        {"asset_ids", report.asset_ids},
        {"oos_mean", report.oos_mean},
        {"oos_wvar", report.oos_wvar},
        {"observations", report.portfolio_returns.size()},
        {"saddle_months", report.saddle_months},
        {"monthly_weights", months},
    };
}

nlohmann::json to_json(const ComparisonRow& row) {
    return {
        {"bucket", row.bucket},
        {"risk_aversion_mean_wvar", row.risk_aversion_wvar},
        {"risk_aversion_mean_variance", row.risk_aversion_mv},
        {"mean", {{"mean_wvar", row.mean_wvar_mean}, {"mean_variance", row.mean_variance_mean}}},
        {"wvar", {{"mean_wvar", row.mean_wvar_risk}, {"mean_variance", row.mean_variance_risk}}},
        {"higher_mean", to_string(row.higher_mean)},
        {"lower_wvar", to_string(row.lower_wvar)},
    };
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream os;
    os << "bucket,risk_aversion,statistic,Mean-WV@R,Mean-Variance,better\n";
    for (const auto& r : rows) {
        const auto aversion = r.risk_aversion_wvar == r.risk_aversion_mv
                                  ? format_number(r.risk_aversion_wvar)
                                  : format_number(r.risk_aversion_wvar) + "/" + format_number(r.risk_aversion_mv);
        os << r.bucket << ',' << aversion << ",Mean," << format_number(r.mean_wvar_mean) << ','
           << format_number(r.mean_variance_mean) << ',' << to_string(r.higher_mean) << '\n';
        os << r.bucket << ',' << aversion << ",WV@R," << format_number(r.mean_wvar_risk) << ','
           << format_number(r.mean_variance_risk) << ',' << to_string(r.lower_wvar) << '\n';
    }
    return os.str();
}

}  // namespace wvar
