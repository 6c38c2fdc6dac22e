// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "oracles.hpp"
#include "test_support.hpp"
#include "wvar/backtest.hpp"
#include "wvar/empirical_dist.hpp"
#include "wvar/market_data.hpp"
#include "wvar/portfolio.hpp"
#include "wvar/quadrature.hpp"
#include "wvar/rebalance.hpp"
#include "wvar/report.hpp"
#include "wvar/risk_measures.hpp"

using namespace wvar;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

EmpiricalDistribution dist(const std::vector<double>& x) { return EmpiricalDistribution::from_samples(x); }

// Fixed set of 500 random fixtures shared by criteria 2 and 3.
std::vector<std::vector<double>> random_fixtures(std::uint64_t seed) {
    testing::Rng rng(seed);
    std::vector<std::vector<double>> out;
    for (int i = 0; i < 500; ++i) out.push_back(testing::random_sample(rng, rng.index(4, 2000)));
    return out;
}

Outcome quadrature_exactness(std::uint64_t seed) {
    Outcome o;
    testing::Rng rng(seed);
    for (const std::size_t n : {2, 4, 8, 16, 64, 128, 1024}) {
        for (int trial = 0; trial < 50; ++trial) {
            double c[4];
            for (auto& v : c) v = rng.uniform(-1.0, 1.0);
            auto p = [&](double x) { return c[0] + x * (c[1] + x * (c[2] + x * c[3])); };
            const double exact = c[0] + c[1] / 2 + c[2] / 3 + c[3] / 4;
            const double scale = std::abs(c[0]) + std::abs(c[1]) / 2 + std::abs(c[2]) / 3 + std::abs(c[3]) / 4;
            const double composite = composite_simpson(p, SimpsonGrid(0.0, 1.0, n));
            const double half = half_node_simpson(p, 0.0, 1.0, n);
            if (std::abs(composite - exact) > 1e-13 * scale) o.fail("composite n=" + std::to_string(n));
            if (std::abs(half - exact) > 1e-13 * scale) o.fail("half-node n=" + std::to_string(n));
            const double twice = composite_simpson(p, SimpsonGrid(0.0, 1.0, 2 * n));
            if (std::abs(half - twice) > 1e-14 * scale) o.fail("half-node vs 2n composite, n=" + std::to_string(n));
        }
    }
    // A non-polynomial integrand too: the rules share nodes and weights.
    auto e = [](double x) { return std::exp(x); };
    if (std::abs(half_node_simpson(e, 0.0, 1.0, 32) - composite_simpson(e, SimpsonGrid(0.0, 1.0, 64))) > 1e-14) {
        o.fail("half-node vs composite on exp");
    }
    if (o.ok) o.detail = "350 cubics, n up to 1024";
    return o;
}

Outcome tvar_oracle(const std::vector<std::vector<double>>& fixtures, std::uint64_t seed) {
    Outcome o;
    testing::Rng rng(seed);
    double worst = 0.0;
    for (const auto& x : fixtures) {
        const auto d = dist(x);
        const double level = rng.uniform(0.005, 1.0);
        const double gap = std::abs(tail_var_simpson(d, level, kDefaultInnerPanels) - tail_var_exact(d, level));
        const double bound = 2.0 * d.range() / static_cast<double>(kDefaultInnerPanels);
        if (gap > bound + 1e-15) o.fail("gap " + fmt(gap) + " > " + fmt(bound) + " at level " + fmt(level));
        if (bound > 0) worst = std::max(worst, gap / bound);
    }
    if (tail_var_exact(dist({-3, -1, 0, 2}), 0.25) != 3.0) o.fail("tail_var_exact(0.25) on [-3,-1,0,2] != 3");
    if (o.ok) o.detail = "max gap/bound " + fmt(worst);
    return o;
}

Outcome wvar_oracle(const std::vector<std::vector<double>>& fixtures) {
    Outcome o;
    double worst = 0.0;
    for (const auto& x : fixtures) {
        const auto d = dist(x);
        const double gap =
            std::abs(weighted_var(d, WeightingMeasure::uniform(), 64) - weighted_var_uniform_closed_form(d));
        const double bound = 2.0 * d.range() / 64.0;
        if (gap > bound + 1e-15) o.fail("gap " + fmt(gap) + " > " + fmt(bound));
        if (bound > 0) worst = std::max(worst, gap / bound);
    }
    const std::vector<double> four{-3, -1, 0, 2};
    const double brute = oracle::weighted_var_double_integral(four, 1000000);
    const double quad = weighted_var(dist(four), WeightingMeasure::uniform(), 64);
    if (std::abs(brute - 1.9712) > 1e-3) o.fail("double integral gives " + fmt(brute));
    if (std::abs(quad - 1.9712) > 0.02) o.fail("weighted_var gives " + fmt(quad));
    if (o.ok) o.detail = "[-3,-1,0,2]: " + fmt(quad) + " (double integral " + fmt(brute) + "), max gap/bound " + fmt(worst);
    return o;
}

Outcome coherence(std::uint64_t seed) {
    Outcome o;
    testing::Rng rng(seed);
    using Measure = std::function<double(const std::vector<double>&)>;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = rng.index(4, 1000);
        const auto x = testing::random_sample(rng, n);
        auto y = testing::random_sample(rng, n);
        const double level = rng.uniform(0.01, 1.0);
        const Measure measures[] = {
            [&](const std::vector<double>& v) { return tail_var_exact(dist(v), level); },
            [](const std::vector<double>& v) { return weighted_var(dist(v), WeightingMeasure::uniform(), 64); },
        };
        const char* names[] = {"tvar", "wvar"};
        double mag = 1.0;
        for (std::size_t i = 0; i < n; ++i) mag = std::max({mag, std::abs(x[i]), std::abs(y[i])});
        const double tol = 1e-9 * mag;
        const double a = rng.uniform(0.01, 10.0);
        const double shift = rng.uniform(-5.0, 5.0);
        std::vector<double> sum(n), scaled(n), moved(n), larger(n);
        for (std::size_t i = 0; i < n; ++i) {
            sum[i] = x[i] + y[i];
            scaled[i] = a * x[i];
            moved[i] = x[i] + shift;
            larger[i] = x[i] + std::abs(y[i]);
        }
        for (int m = 0; m < 2; ++m) {
            const auto& rho = measures[m];
            const double rx = rho(x);
            const std::string tag = std::string(names[m]) + " trial " + std::to_string(trial) + ": ";
            if (rho(sum) > rx + rho(y) + tol) o.fail(tag + "subadditivity");
            if (std::abs(rho(scaled) - a * rx) > tol * a) o.fail(tag + "positive homogeneity");
            if (std::abs(rho(moved) - (rx - shift)) > tol + 1e-9 * std::abs(shift)) o.fail(tag + "translation");
            if (rho(larger) > rx + tol) o.fail(tag + "monotonicity");
        }
    }
    if (o.ok) o.detail = "500 pairs, 4 axioms, tvar and wvar";
    return o;
}

ReturnSeries iid_normal(std::uint64_t seed, std::size_t n) {
    testing::Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = 0.01 * rng.normal();
    return testing::dated_series("iid", v);
}

// Small steady gains with frequent large losses.
ReturnSeries left_skewed(std::uint64_t seed, std::size_t n) {
    testing::Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform() < 0.12 ? -rng.uniform(0.02, 0.06) : 0.004 + 0.002 * rng.normal();
    return testing::dated_series("skew", v);
}

Outcome backtest_calibration(std::uint64_t seed, const std::vector<ReturnSeries>& csv_series) {
    Outcome o;
    const WindowSpec rolling{WindowMode::rolling, 250, 1};
    const auto measure = WeightingMeasure::uniform();
    std::ostringstream detail;

    const auto iid = run_review_test(iid_normal(seed, 10000 + 250), rolling, 0.05, measure, 16);
    const double rate = iid.results[0].failure_rate;
    if (rate < 0.03 || rate > 0.07) o.fail("i.i.d. VaR failure rate " + fmt(rate));
    detail << "iid VaR rate " << fmt(rate);

    auto check_dominance = [&](const std::string& name, const ReviewTest& r) {
        if (r.results[1].failures > r.results[0].failures) o.fail(name + ": TVaR fails more often than VaR");
    };
    check_dominance("iid", iid);
    for (const auto& s : csv_series) {
        const auto r = run_review_test(s, rolling, 0.05, measure, 16);
        check_dominance(s.asset_id, r);
        detail << "; " << s.asset_id << " " << r.results[0].failures << "/" << r.results[1].failures << "/"
               << r.results[2].failures << " of " << r.results[0].total_tests;
    }

    const auto skew = run_review_test(left_skewed(seed + 1, 253 + 250), rolling, 0.05, measure);
    check_dominance("skew", skew);
    const auto f = [&](int i) { return skew.results[static_cast<std::size_t>(i)].failures; };
    detail << "; skew " << f(0) << "/" << f(1) << "/" << f(2) << " of 253 (var/tvar/wvar)";
    if (!(f(1) <= f(0) && f(0) < f(2))) o.fail("left-skewed ordering TVaR <= VaR < WVAR violated: " + detail.str());
    if (classify_result(skew.results[2], 0.05) != Verdict::risk_estimated_low) {
        o.fail("left-skewed WVAR verdict is not 'risk estimated low': " + detail.str());
    }
    if (o.ok) o.detail = detail.str();
    return o;
}

std::vector<AssetProfile> random_profiles(testing::Rng& rng, std::size_t n) {
    std::vector<AssetProfile> p;
    for (std::size_t i = 0; i < n; ++i) {
        p.push_back({"A" + std::to_string(i), rng.uniform(-0.002, 0.003), rng.uniform(0.002, 0.05),
                     rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)});
    }
    return p;
}

Outcome closed_form(std::uint64_t seed) {
    Outcome o;
    testing::Rng rng(seed);
    double worst_res = 0.0;
    double worst_budget = 0.0;
    std::size_t saddles = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = rng.index(2, 5);
        const auto profiles = random_profiles(rng, n);
        const ScalarizationParams params{std::pow(10.0, rng.uniform(-2.0, 1.7)), 1e8};
        PortfolioSolution sol;
        try {
            sol = solve_weighted_quadratic(profiles, params);
        } catch (const std::exception& e) {
            o.fail(std::string("solver threw: ") + e.what());
            continue;
        }
        if (!sol.second_order_ok) ++saddles;
        Eigen::VectorXd mv(n), av(n), x(n);
        for (std::size_t i = 0; i < n; ++i) {
            mv(i) = profiles[i].revenue_weight * profiles[i].mean_return;
            av(i) = profiles[i].risk_weight * profiles[i].wvar;
            x(i) = sol.weights[i];
        }
        const Eigen::VectorXd c = Eigen::VectorXd::Ones(n);
        const Eigen::MatrixXd q = -mv * mv.transpose() + params.risk_aversion * av * av.transpose() +
                                  params.penalty * c * c.transpose();
        const Eigen::VectorXd rhs = params.penalty * c;
        const double res = (q * x - rhs).norm() / rhs.norm();
        const double budget = std::abs(x.sum() - 1.0);
        worst_res = std::max(worst_res, res);
        worst_budget = std::max(worst_budget, budget);
        if (res > 1e-10) o.fail("relative residual " + fmt(res));
        if (budget > 1e-5) o.fail("budget residual " + fmt(budget));
    }
    const std::vector<AssetProfile> twins{{"A", 0.0007, 0.02, 1, 1}, {"B", 0.0007, 0.02, 1, 1}};
    const auto sym = solve_weighted_quadratic(twins, {1.0, 1e8});
    if (std::abs(sym.weights[0] - 0.5) > 1e-6 || std::abs(sym.weights[1] - 0.5) > 1e-6) {
        o.fail("symmetric inputs gave (" + fmt(sym.weights[0]) + ", " + fmt(sym.weights[1]) + ")");
    }
    if (o.ok) {
        o.detail = "max residual " + fmt(worst_res) + ", max |c'X-1| " + fmt(worst_budget) + ", " +
                   std::to_string(saddles) + " saddles flagged";
    }
    return o;
}

Outcome lp_vertex(std::uint64_t seed) {
    Outcome o;
    testing::Rng rng(seed);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = rng.index(2, 8);
        const auto profiles = random_profiles(rng, n);
        const double m = std::pow(10.0, rng.uniform(-2.0, 2.0));
        const auto sol = solve_linear_scalarization(profiles, {m, 1e12});
        auto objective = [&](const std::vector<double>& x) {
            return -total_revenue(profiles, x) + m * whole_wvar(profiles, x);
        };
        const double best = objective(sol.weights);
        for (int k = 0; k < 1000; ++k) {
            std::vector<double> x(n);
            double total = 0.0;
            for (auto& v : x) {
                v = -std::log(std::max(rng.uniform(), 1e-300));
                total += v;
            }
            for (auto& v : x) v /= total;
            if (objective(x) < best - 1e-15) {
                o.fail("random point beats the vertex on trial " + std::to_string(trial));
                break;
            }
        }
    }
    if (o.ok) o.detail = "100 fixtures x 1000 points";
    return o;
}

Outcome rebalance_harness(const std::vector<ReturnSeries>& series) {
    Outcome o;
    using namespace std::chrono;
    const Date start{year{2008} / January / 1};
    if (series.empty()) {
        o.fail("fixture missing");
        return o;
    }
    const auto& first = series[0].observations.front().date;
    const auto& last = series[0].observations.back().date;
    if (year_month{first.year(), first.month()} != year{2003} / October ||
        year_month{last.year(), last.month()} != year{2012} / September) {
        o.fail("fixture does not span Oct 2003 - Sep 2012");
    }

    std::vector<PerformanceReport> reports;
    for (const double m : {1e-2, 1.0, 1e2, 1e4}) {
        for (const auto method : {Strategy::mean_wvar_quadratic, Strategy::mean_variance}) {
            StrategySpec spec;
            spec.method = method;
            spec.risk_aversion = m;
            reports.push_back(run_rebalance(series, spec, start));
            const auto& r = reports.back();
            if (r.monthly_weights.size() != 57) {
                o.fail(std::string(to_string(method)) + " produced " + std::to_string(r.monthly_weights.size()) +
                       " months");
            }
            // Recompute three months from truncated history only.
            for (const std::size_t idx : {std::size_t{0}, std::size_t{28}, std::size_t{56}}) {
                if (idx >= r.monthly_weights.size()) break;
                const Date month_start{r.monthly_weights[idx].month / 1};
                auto cut = series;
                for (auto& s : cut) {
                    std::erase_if(s.observations, [&](const ReturnObservation& ob) { return ob.date >= month_start; });
                }
                const auto w = monthly_allocation(cut, spec, cut[0].size());
                if (w != r.monthly_weights[idx].weights) o.fail("look-ahead detected in month " + std::to_string(idx));
            }
        }
    }

    const auto rows = compare_strategies(reports);
    const auto table = comparison_csv(rows);
    if (rows.size() != 4 || rows[3].bucket != "Very Low Risk") o.fail("Very Low Risk row missing");
    if (table.find("Very Low Risk,") == std::string::npos) o.fail("Very Low Risk not in table");
    for (const auto& row : rows) {
        const auto expect_mean = row.mean_wvar_mean > row.mean_variance_mean   ? Winner::mean_wvar
                                 : row.mean_wvar_mean < row.mean_variance_mean ? Winner::mean_variance
                                                                               : Winner::tie;
        const auto expect_risk = row.mean_wvar_risk < row.mean_variance_risk   ? Winner::mean_wvar
                                 : row.mean_wvar_risk > row.mean_variance_risk ? Winner::mean_variance
                                                                               : Winner::tie;
        if (row.higher_mean != expect_mean || row.lower_wvar != expect_risk) {
            o.fail(row.bucket + ": dominance flags disagree with the numbers");
        }
    }
    if (o.ok) {
        const auto& v = rows.back();
        o.detail = "57 months x 8 runs; Very Low Risk mean " + fmt(v.mean_wvar_mean) + " vs " +
                   fmt(v.mean_variance_mean) + ", WV@R " + fmt(v.mean_wvar_risk) + " vs " +
                   fmt(v.mean_variance_risk);
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks", "wvar_acceptance"};
    std::uint64_t seed = 20240101;
    std::string data_dir = ".";
    app.add_option("--seed", seed, "Base seed for the randomized suites")->capture_default_str();
    app.add_option("--data-dir", data_dir, "Directory holding two_etfs.csv")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    std::vector<ReturnSeries> fixture;
    try {
        for (const auto& p : load_price_csv(data_dir + "/two_etfs.csv")) fixture.push_back(compute_returns(p));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "cannot load fixture: %s\n", e.what());
    }
    const auto fixtures = random_fixtures(seed);

    struct Criterion {
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"quadrature exactness", 1.0, [&] { return quadrature_exactness(seed + 1); }},
        {"tail V@R oracle equivalence", 10.0, [&] { return tvar_oracle(fixtures, seed + 2); }},
        {"Weighted-V@R closed-form oracle", 1e9, [&] { return wvar_oracle(fixtures); }},
        {"coherence suite", 30.0, [&] { return coherence(seed + 4); }},
        {"backtest calibration", 1e9, [&] { return backtest_calibration(seed + 5, fixture); }},
        {"closed-form solver", 1e9, [&] { return closed_form(seed + 6); }},
        {"LP scalarization", 1e9, [&] { return lp_vertex(seed + 7); }},
        {"rebalance harness", 60.0, [&] { return rebalance_harness(fixture); }},
    };

    int failures = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_seconds) outcome.fail("took " + fmt(secs) + " s, budget " + fmt(c.budget_seconds) + " s");
        if (!outcome.ok) ++failures;
        std::printf("%s  %d. %s (%.2f s): %s\n", outcome.ok ? "PASS" : "FAIL", index, c.name, secs,
                    outcome.detail.c_str());
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
