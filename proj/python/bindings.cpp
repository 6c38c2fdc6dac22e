#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wvar/backtest.hpp"
#include "wvar/empirical_dist.hpp"
#include "wvar/error.hpp"
#include "wvar/market_data.hpp"
#include "wvar/portfolio.hpp"
#include "wvar/quadrature.hpp"
#include "wvar/rebalance.hpp"
#include "wvar/risk_measures.hpp"

namespace py = pybind11;
using namespace wvar;

namespace {

using Samples = std::vector<double>;

EmpiricalDistribution dist_of(const Samples& samples) { return EmpiricalDistribution::from_samples(samples); }

std::vector<std::string> dates_of(const std::vector<ReturnObservation>& obs) {
    std::vector<std::string> out;
    for (const auto& o : obs) out.push_back(format_date(o.date));
    return out;
}

ReturnSeries make_return_series(const std::string& asset_id, const std::vector<std::string>& dates,
                                const Samples& values) {
    if (dates.size() != values.size()) throw InvalidArgument("python", "dates and values differ in length");
    ReturnSeries s{asset_id, {}};
    for (std::size_t k = 0; k < dates.size(); ++k) s.observations.push_back({parse_date(dates[k]), values[k]});
    return s;
}

py::dict solution_dict(const PortfolioSolution& s) {
    py::dict d;
    d["method"] = std::string(to_string(s.method));
    d["weights"] = s.weights;
    d["projected_weights"] = s.projected_weights;
    d["objective_value"] = s.objective_value;
    d["gradient_residual"] = s.gradient_residual;
    d["budget_residual"] = s.budget_residual;
    d["feasible"] = s.feasible;
    d["second_order_ok"] = s.second_order_ok;
    d["condition_estimate"] = s.condition_estimate;
    d["rank_deficient"] = s.rank_deficient;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Weighted-V@R risk measures, review testing and portfolio selection";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InvalidArgument& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::class_<EmpiricalDistribution>(m, "EmpiricalDistribution")
        .def(py::init(&dist_of), py::arg("samples"))
        .def("quantile", &EmpiricalDistribution::quantile, py::arg("s"))
        .def_property_readonly("sorted_samples", [](const EmpiricalDistribution& d) {
            return Samples(d.sorted_samples().begin(), d.sorted_samples().end());
        })
        .def("__len__", &EmpiricalDistribution::size);

    py::class_<WeightingMeasure>(m, "WeightingMeasure")
        .def_static("uniform", &WeightingMeasure::uniform)
        .def_static("atoms", [](const std::vector<std::pair<double, double>>& atoms) {
            std::vector<WeightingMeasure::Atom> out;
            for (const auto& [level, weight] : atoms) out.push_back({level, weight});
            return WeightingMeasure::from_atoms(std::move(out));
        }, py::arg("atoms"))
        .def_static("density", &WeightingMeasure::from_density, py::arg("grid_values"))
        .def_static("parse", &WeightingMeasure::parse, py::arg("text"))
        .def("__repr__", &WeightingMeasure::describe);

    m.def("composite_simpson", [](const std::function<double(double)>& f, double a, double b, std::size_t n) {
        return composite_simpson(f, SimpsonGrid(a, b, n));
    }, py::arg("f"), py::arg("a"), py::arg("b"), py::arg("n"));
    m.def("half_node_simpson", [](const std::function<double(double)>& f, double a, double b, std::size_t panels) {
        return half_node_simpson(f, a, b, panels);
    }, py::arg("f"), py::arg("a"), py::arg("b"), py::arg("panels"));

    m.def("value_at_risk", [](const Samples& x, double level) { return value_at_risk(dist_of(x), level); },
          py::arg("samples"), py::arg("level"));
    m.def("tail_var_exact", [](const Samples& x, double level) { return tail_var_exact(dist_of(x), level); },
          py::arg("samples"), py::arg("level"));
    m.def("tail_var_simpson", [](const Samples& x, double level, std::size_t panels) {
        return tail_var_simpson(dist_of(x), level, panels);
    }, py::arg("samples"), py::arg("level"), py::arg("inner_panels") = kDefaultInnerPanels);
    m.def("worst_case_loss", [](const Samples& x) { return worst_case_loss(dist_of(x)); }, py::arg("samples"));
    m.def("weighted_var", [](const Samples& x, const WeightingMeasure& measure, std::size_t panels) {
        return weighted_var(dist_of(x), measure, panels);
    }, py::arg("samples"), py::arg("measure") = WeightingMeasure::uniform(),
          py::arg("outer_panels") = kDefaultOuterPanels);
    m.def("weighted_var_uniform_closed_form",
          [](const Samples& x) { return weighted_var_uniform_closed_form(dist_of(x)); }, py::arg("samples"));
    m.def("risk_report", [](const Samples& x, double level, const WeightingMeasure& measure, std::size_t panels) {
        const auto r = make_risk_report(dist_of(x), level, measure, panels);
        py::dict d;
        d["var"] = r.var;
        d["tvar"] = r.tvar;
        d["wvar"] = r.wvar;
        d["level"] = r.level;
        d["n_samples"] = r.n_samples;
        return d;
    }, py::arg("samples"), py::arg("level") = 0.05, py::arg("measure") = WeightingMeasure::uniform(),
          py::arg("outer_panels") = kDefaultOuterPanels);

    py::class_<ReturnSeries>(m, "ReturnSeries")
        .def(py::init(&make_return_series), py::arg("asset_id"), py::arg("dates"), py::arg("values"))
        .def_readonly("asset_id", &ReturnSeries::asset_id)
        .def_property_readonly("dates", [](const ReturnSeries& s) { return dates_of(s.observations); })
        .def_property_readonly("values", &ReturnSeries::values)
        .def("__len__", &ReturnSeries::size);

    m.def("load_returns", [](const std::string& path) {
        std::vector<ReturnSeries> out;
        for (const auto& p : load_price_csv(path)) out.push_back(compute_returns(p));
        return out;
    }, py::arg("path"), "Load a wide price CSV and return one ReturnSeries per asset column.");
    m.def("simple_returns", [](const Samples& closes) {
        PriceSeries p{"asset", {}};
        auto day = std::chrono::sys_days{std::chrono::year{2000} / 1 / 1};
        for (const double c : closes) {
            p.observations.push_back({Date{day}, c});
            day += std::chrono::days{1};
        }
        return compute_returns(p).values();
    }, py::arg("closes"));

    m.def("run_review_test", [](const ReturnSeries& s, std::size_t length, double level, const std::string& mode,
                                std::size_t step, const WeightingMeasure& measure) {
        const auto review = run_review_test(s, WindowSpec{parse_window_mode(mode), length, step}, level, measure);
        py::dict out;
        for (const auto& r : review.results) {
            py::dict d;
            d["total_tests"] = r.total_tests;
            d["failures"] = r.failures;
            d["failure_rate"] = r.failure_rate;
            std::vector<std::string> dates;
            for (const auto day : r.failure_dates) dates.push_back(format_date(day));
            d["failure_dates"] = dates;
            d["verdict"] = std::string(to_string(classify_result(r, level)));
            out[py::str(std::string(to_string(r.measure)))] = d;
        }
        return out;
    }, py::arg("series"), py::arg("window_length") = 250, py::arg("level") = 0.05, py::arg("mode") = "rolling",
          py::arg("step") = 1, py::arg("measure") = WeightingMeasure::uniform());

    py::class_<AssetProfile>(m, "AssetProfile")
        .def(py::init([](std::string id, double mean, double wvar_value, double k, double mw) {
            return AssetProfile{std::move(id), mean, wvar_value, k, mw};
        }), py::arg("asset_id"), py::arg("mean_return"), py::arg("wvar"), py::arg("risk_weight") = 1.0,
            py::arg("revenue_weight") = 1.0)
        .def_readwrite("asset_id", &AssetProfile::asset_id)
        .def_readwrite("mean_return", &AssetProfile::mean_return)
        .def_readwrite("wvar", &AssetProfile::wvar)
        .def_readwrite("risk_weight", &AssetProfile::risk_weight)
        .def_readwrite("revenue_weight", &AssetProfile::revenue_weight);

    m.def("whole_wvar", [](const std::vector<AssetProfile>& p, const Samples& x) { return whole_wvar(p, x); },
          py::arg("profiles"), py::arg("x"));
    m.def("total_revenue", [](const std::vector<AssetProfile>& p, const Samples& x) { return total_revenue(p, x); },
          py::arg("profiles"), py::arg("x"));
    m.def("solve_linear_scalarization", [](const std::vector<AssetProfile>& p, double risk_aversion) {
        return solution_dict(solve_linear_scalarization(p, {risk_aversion, 1.0}));
    }, py::arg("profiles"), py::arg("risk_aversion"));
    m.def("solve_weighted_quadratic", [](const std::vector<AssetProfile>& p, double risk_aversion, double penalty) {
        return solution_dict(solve_weighted_quadratic(p, {risk_aversion, penalty}));
    }, py::arg("profiles"), py::arg("risk_aversion"), py::arg("penalty") = 1e8);
    m.def("solve_mean_variance", [](const Samples& means, const Eigen::MatrixXd& cov, double risk_aversion,
                                    double penalty, int power) {
        return solution_dict(solve_mean_variance(means, cov, {risk_aversion, penalty}, power));
    }, py::arg("mean_returns"), py::arg("covariance"), py::arg("risk_aversion"), py::arg("penalty") = 1e8,
          py::arg("variance_power") = 2);
    m.def("project_to_simplex", [](const Samples& x) { return project_to_simplex(x); }, py::arg("x"));

    m.def("run_rebalance", [](const std::vector<ReturnSeries>& series, const std::string& method,
                              double risk_aversion, double penalty, const std::string& eval_start,
                              int variance_power) {
        StrategySpec spec;
        spec.method = method == "mean-variance" ? Strategy::mean_variance : Strategy::mean_wvar_quadratic;
        if (method != "mean-variance" && method != "mean-wvar") {
            throw InvalidArgument("python", "method must be 'mean-wvar' or 'mean-variance'");
        }
        spec.risk_aversion = risk_aversion;
        spec.penalty = penalty;
        spec.variance_power = variance_power;
        const auto r = run_rebalance(series, spec, parse_date(eval_start));
        py::dict d;
        d["oos_mean"] = r.oos_mean;
        d["oos_wvar"] = r.oos_wvar;
        py::list months;
        for (const auto& mw : r.monthly_weights) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(mw.month.year()),
                          static_cast<unsigned>(mw.month.month()));
            months.append(py::make_tuple(std::string(buf), mw.weights));
        }
        d["monthly_weights"] = months;
        d["saddle_months"] = r.saddle_months;
        return d;
    }, py::arg("series"), py::arg("method"), py::arg("risk_aversion"), py::arg("penalty") = 1e12,
          py::arg("eval_start") = "2008-01-01", py::arg("variance_power") = 2);
}
