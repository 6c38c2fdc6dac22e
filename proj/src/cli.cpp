#include "wvar/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "wvar/backtest.hpp"
#include "wvar/empirical_dist.hpp"
#include "wvar/error.hpp"
#include "wvar/market_data.hpp"
#include "wvar/portfolio.hpp"
#include "wvar/rebalance.hpp"
#include "wvar/report.hpp"
#include "wvar/risk_measures.hpp"

namespace wvar::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kModule = "cli";

enum class Format { json, csv };

struct RunConfig {
    std::string input;
    std::string output;
    std::string report;
    std::string format = "json";
    double level = 0.05;
    std::string measure = "uniform";
    std::size_t inner_panels = kDefaultInnerPanels;
    std::size_t outer_panels = kDefaultOuterPanels;
    // backtest
    std::string asset;
    std::string window_mode = "rolling";
    std::size_t window_length = 250;
    std::size_t step = 1;
    double band_confidence = 0.95;
    // optimize / compare
    std::string method = "quadratic";
    double risk_aversion = 1.0;
    double penalty = 1e12;
    std::string weights_file;
    int variance_power = 2;
    std::string eval_start = "2008-01-01";
    std::vector<double> risk_aversions{1e-2, 1.0, 1e2, 1e4};
    std::size_t min_history = 20;
};

std::string env_name(const std::string& flag) {
    std::string out = "WVAR_";
    for (const char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

template <class T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& target, const std::string& help) {
    return app->add_option("--" + name, target, help)->envname(env_name(name))->capture_default_str();
}

void add_measure_flags(CLI::App* app, RunConfig& cfg) {
    flag(app, "measure", cfg.measure, "Weighting measure over tail levels: uniform | atom:<level> | <density file>");
    flag(app, "inner-panels", cfg.inner_panels, "Simpson subintervals for the tail V@R integral (even)")
        ->check(CLI::PositiveNumber);
    flag(app, "outer-panels", cfg.outer_panels, "Simpson panels for the Weighted-V@R level integral")
        ->check(CLI::PositiveNumber);
}

// Writes to a sibling temporary file and renames it into place, so a failed
// run never leaves a partial report.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".partial";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError(kModule, "cannot write '" + tmp.string() + "'");
        f << content;
        if (!f) {
            f.close();
            fs::remove(tmp);
            throw DataError(kModule, "failed writing '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, target);
}

Format parse_format(const std::string& text) {
    if (text == "json") return Format::json;
    if (text == "csv") return Format::csv;
    throw InvalidArgument(kModule, "--format must be json or csv, got '" + text + "'");
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::vector<ReturnSeries> load_returns(const std::string& path) {
    std::vector<ReturnSeries> out;
    for (const auto& p : load_price_csv(path)) out.push_back(compute_returns(p));
    return out;
}

Convention convention_of(const RunConfig& cfg, const WeightingMeasure& measure) {
    return {measure, cfg.inner_panels, cfg.outer_panels};
}

void check_panels(const RunConfig& cfg) {
    if (cfg.inner_panels % 2 != 0) {
        throw InvalidArgument(kModule, "--inner-panels must be even, got " + std::to_string(cfg.inner_panels));
    }
}

int run_risk(const RunConfig& cfg, std::ostream& out) {
    validate_level_open(cfg.level, "--level");
    check_panels(cfg);
    const auto format = parse_format(cfg.format);
    const auto measure = WeightingMeasure::parse(cfg.measure);
    const auto series = load_returns(cfg.input);

    nlohmann::json assets = nlohmann::json::array();
    std::ostringstream csv;
    csv << "asset_id,n_samples,level,var,tvar,tvar_simpson,wvar\n";
    for (const auto& s : series) {
        const auto dist = EmpiricalDistribution::from_samples(s.values());
        const auto report = make_risk_report(dist, cfg.level, measure, cfg.outer_panels);
        const double tvar_simpson = tail_var_simpson(dist, cfg.level, cfg.inner_panels);
        auto j = to_json(report);
        j["asset_id"] = s.asset_id;
        j["tvar_simpson"] = tvar_simpson;
        assets.push_back(j);
        csv << s.asset_id << ',' << report.n_samples << ',' << format_number(report.level) << ','
            << format_number(report.var) << ',' << format_number(report.tvar) << ','
            << format_number(tvar_simpson) << ',' << format_number(report.wvar) << '\n';
    }
    if (format == Format::csv) {
        emit(cfg.output, csv.str(), out);
    } else {
        emit(cfg.output, dump({{"convention", to_json(convention_of(cfg, measure))}, {"assets", assets}}), out);
    }
    return kSuccess;
}

int run_backtest(const RunConfig& cfg, std::ostream& out) {
    validate_level_open(cfg.level, "--level");
    if (!(cfg.band_confidence >= 0.0 && cfg.band_confidence < 1.0)) {
        throw InvalidArgument(kModule, "--band-confidence must lie in [0, 1)");
    }
    const WindowSpec window{parse_window_mode(cfg.window_mode), cfg.window_length, cfg.step};
    window.validate();
    const auto measure = WeightingMeasure::parse(cfg.measure);
    auto series = load_returns(cfg.input);
    if (!cfg.asset.empty()) {
        std::erase_if(series, [&](const ReturnSeries& s) { return s.asset_id != cfg.asset; });
        if (series.empty()) throw DataError(kModule, "no asset named '" + cfg.asset + "' in " + cfg.input);
    }

    nlohmann::json assets = nlohmann::json::array();
    for (const auto& s : series) {
        const auto review = run_review_test(s, window, cfg.level, measure, cfg.outer_panels);
        nlohmann::json results = nlohmann::json::array();
        for (const auto& r : review.results) results.push_back(to_json(r, cfg.level, cfg.band_confidence));
        assets.push_back({{"asset_id", s.asset_id}, {"results", results}});
    }
    const nlohmann::json report = {
        {"convention", to_json(convention_of(cfg, measure))},
        {"level", cfg.level},
        {"band_confidence", cfg.band_confidence},
        {"failure_rule", "realized next-period loss strictly greater than the estimate"},
        {"window", {{"mode", cfg.window_mode}, {"length", cfg.window_length}, {"step", cfg.step}}},
        {"assets", assets},
    };
    emit(cfg.report.empty() ? cfg.output : cfg.report, dump(report), out);
    return kSuccess;
}

std::map<std::string, std::pair<double, double>> load_weights_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(kModule, "cannot open weights file '" + path + "'");
    std::map<std::string, std::pair<double, double>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.starts_with("asset_id")) continue;
        std::istringstream row(line);
        std::string id, k, m;
        if (!std::getline(row, id, ',') || !std::getline(row, k, ',') || !std::getline(row, m)) {
            throw DataError(kModule, path + ":" + std::to_string(line_no) +
                                         ": expected asset_id,risk_weight,revenue_weight");
        }
        try {
            out[id] = {std::stod(k), std::stod(m)};
        } catch (const std::exception&) {
            throw DataError(kModule, path + ":" + std::to_string(line_no) + ": unparseable weight");
        }
    }
    return out;
}

Eigen::MatrixXd sample_covariance(const std::vector<ReturnSeries>& series, const std::vector<double>& means) {
    const auto n = static_cast<Eigen::Index>(series.size());
    const auto t = series.front().size();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a; b < n; ++b) {
            double acc = 0.0;
            for (std::size_t k = 0; k < t; ++k) {
                acc += (series[a].observations[k].value - means[a]) * (series[b].observations[k].value - means[b]);
            }
            cov(a, b) = cov(b, a) = acc / static_cast<double>(t > 1 ? t - 1 : 1);
        }
    }
    return cov;
}

int run_optimize(const RunConfig& cfg, std::ostream& out) {
    check_panels(cfg);
    const auto method = parse_method(cfg.method);
    const auto measure = WeightingMeasure::parse(cfg.measure);
    if (cfg.variance_power != 1 && cfg.variance_power != 2) {
        throw InvalidArgument(kModule, "--variance-power must be 1 or 2");
    }
    const auto weights = cfg.weights_file.empty() ? decltype(load_weights_file("")){} : load_weights_file(cfg.weights_file);
    const auto series = load_returns(cfg.input);

    std::vector<AssetProfile> profiles;
    std::vector<double> means;
    for (const auto& s : series) {
        const auto values = s.values();
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        AssetProfile p{s.asset_id, mean,
                       weighted_var(EmpiricalDistribution::from_samples(values), measure, cfg.outer_panels)};
        if (const auto it = weights.find(s.asset_id); it != weights.end()) {
            p.risk_weight = it->second.first;
            p.revenue_weight = it->second.second;
        }
        profiles.push_back(p);
        means.push_back(mean);
    }
    const ScalarizationParams params{cfg.risk_aversion, cfg.penalty};
    PortfolioSolution sol;
    switch (method) {
        case Method::linear: sol = solve_linear_scalarization(profiles, params); break;
        case Method::quadratic: sol = solve_weighted_quadratic(profiles, params); break;
        case Method::mean_variance:
            sol = solve_mean_variance(means, sample_covariance(series, means), params, cfg.variance_power);
            break;
    }

    if (parse_format(cfg.format) == Format::csv) {
        std::ostringstream csv;
        csv << "asset_id,mean_return,wvar,risk_weight,revenue_weight,weight,projected_weight\n";
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            const auto& p = profiles[i];
            csv << p.asset_id << ',' << format_number(p.mean_return) << ',' << format_number(p.wvar) << ','
                << format_number(p.risk_weight) << ',' << format_number(p.revenue_weight) << ','
                << format_number(sol.weights[i]) << ',' << format_number(sol.projected_weights[i]) << '\n';
        }
        emit(cfg.output, csv.str(), out);
        return kSuccess;
    }
    nlohmann::json assets = nlohmann::json::array();
    for (const auto& p : profiles) {
        assets.push_back({{"asset_id", p.asset_id}, {"mean_return", p.mean_return}, {"wvar", p.wvar},
                          {"risk_weight", p.risk_weight}, {"revenue_weight", p.revenue_weight}});
    }
    auto j = to_json(sol);
    j["risk_aversion"] = cfg.risk_aversion;
    if (method != Method::linear) j["penalty"] = cfg.penalty;
    if (method == Method::mean_variance) j["variance_power"] = cfg.variance_power;
    emit(cfg.output, dump({{"convention", to_json(convention_of(cfg, measure))}, {"assets", assets}, {"solution", j}}),
         out);
    return kSuccess;
}

int run_compare(const RunConfig& cfg, std::ostream& out) {
    check_panels(cfg);
    const auto start = parse_date(cfg.eval_start);
    const auto measure = WeightingMeasure::parse(cfg.measure);
    if (cfg.risk_aversions.empty()) throw InvalidArgument(kModule, "--risk-aversions needs at least one value");
    for (const double m : cfg.risk_aversions) {
        if (!(m >= 0.0)) throw InvalidArgument(kModule, "--risk-aversions values must be nonnegative");
    }
    const auto series = load_returns(cfg.input);

    std::vector<PerformanceReport> reports;
    for (const double m : cfg.risk_aversions) {
        for (const auto method : {Strategy::mean_wvar_quadratic, Strategy::mean_variance}) {
            StrategySpec spec;
            spec.method = method;
            spec.risk_aversion = m;
            spec.penalty = cfg.penalty;
            spec.measure = measure;
            spec.variance_power = cfg.variance_power;
            spec.outer_panels = cfg.outer_panels;
            spec.min_history = cfg.min_history;
            reports.push_back(run_rebalance(series, spec, start));
        }
    }
    const auto rows = compare_strategies(reports);
    if (!cfg.report.empty()) {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& r : reports) jr.push_back(to_json(r));
        nlohmann::json jc = nlohmann::json::array();
        for (const auto& r : rows) jc.push_back(to_json(r));
        emit(cfg.report,
             dump({{"convention", to_json(convention_of(cfg, measure))},
                   {"holding_rule", "weights held at the monthly target on every day of the month"},
                   {"evaluation_start", cfg.eval_start},
                   {"comparison", jc},
                   {"reports", jr}}),
             out);
    }
    std::string table = "# daily portfolio returns use weights held at the monthly target\n";
    table += comparison_csv(rows);
    emit(cfg.output, table, out);
    return kSuccess;
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const InvalidArgument*>(&e)) return kUsageError;
    if (dynamic_cast<const DataError*>(&e)) return kDataError;
    return kNumericalError;
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Weighted-V@R risk measurement, review testing and portfolio selection", "wvar"};
    app.require_subcommand(1);

    auto* risk = app.add_subcommand("risk", "V@R, tail V@R and Weighted-V@R per asset");
    flag(risk, "input", cfg.input, "Wide price CSV (date, one close column per asset)")->required();
    flag(risk, "level", cfg.level, "Tail probability level in (0, 1)");
    add_measure_flags(risk, cfg);
    flag(risk, "output", cfg.output, "Output file (default: stdout)");
    flag(risk, "format", cfg.format, "json | csv");

    auto* backtest = app.add_subcommand("backtest", "Rolling review test: failure counts per measure");
    flag(backtest, "input", cfg.input, "Wide price CSV")->required();
    flag(backtest, "asset", cfg.asset, "Restrict to one asset column (default: all)");
    flag(backtest, "level", cfg.level, "Tail probability level in (0, 1)");
    flag(backtest, "window-mode", cfg.window_mode, "rolling | expanding");
    flag(backtest, "window-length", cfg.window_length, "Rolling length, or minimum length when expanding");
    flag(backtest, "step", cfg.step, "Observations between successive tests");
    flag(backtest, "band-confidence", cfg.band_confidence,
         "Binomial band for the verdict; 0 compares the failure rate with the level directly");
    add_measure_flags(backtest, cfg);
    flag(backtest, "report", cfg.report, "JSON report file (default: stdout)");

    auto* optimize = app.add_subcommand("optimize", "Single-period portfolio from full-history inputs");
    flag(optimize, "input", cfg.input, "Wide price CSV")->required();
    flag(optimize, "method", cfg.method, "lp | quadratic | mean-variance");
    flag(optimize, "risk-aversion", cfg.risk_aversion, "Risk aversion m >= 0");
    flag(optimize, "penalty", cfg.penalty, "Budget penalty J (quadratic and mean-variance)");
    flag(optimize, "weights-file", cfg.weights_file, "CSV asset_id,risk_weight,revenue_weight (default: all 1)");
    flag(optimize, "variance-power", cfg.variance_power, "Power on the variance term: 1 or 2");
    add_measure_flags(optimize, cfg);
    flag(optimize, "output", cfg.output, "Output file (default: stdout)");
    flag(optimize, "format", cfg.format, "json | csv");

    auto* compare = app.add_subcommand("compare", "Monthly-rebalanced Mean-WV@R vs Mean-Variance");
    flag(compare, "assets", cfg.input, "Wide price CSV with aligned assets")->required();
    flag(compare, "eval-start", cfg.eval_start, "First evaluation date (YYYY-MM-DD)");
    flag(compare, "risk-aversions", cfg.risk_aversions, "Comma-separated risk aversions")->delimiter(',');
    flag(compare, "penalty", cfg.penalty, "Budget penalty J");
    flag(compare, "variance-power", cfg.variance_power, "Power on the variance term: 1 or 2");
    flag(compare, "min-history", cfg.min_history, "Observations required before the first month");
    add_measure_flags(compare, cfg);
    flag(compare, "output", cfg.output, "Comparison CSV file (default: stdout)");
    flag(compare, "report", cfg.report, "JSON report with monthly weights");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kSuccess;
        }
        err << "wvar: " << e.what() << "\n";
        return kUsageError;
    }

    try {
        if (risk->parsed()) return run_risk(cfg, out);
        if (backtest->parsed()) return run_backtest(cfg, out);
        if (optimize->parsed()) return run_optimize(cfg, out);
        if (compare->parsed()) return run_compare(cfg, out);
    } catch (const Error& e) {
        err << "wvar: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "wvar: " << e.what() << "\n";
        return kNumericalError;
    }
    return kUsageError;
}

}  // namespace wvar::cli
