#include "wvar/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wvar/error.hpp"

namespace wvar {
namespace {

constexpr const char* kModule = "portfolio";

std::string number(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void validate_profiles(std::span<const AssetProfile> profiles) {
    if (profiles.empty()) throw InvalidArgument(kModule, "at least one asset profile is required");
    for (const auto& p : profiles) {
        if (!std::isfinite(p.mean_return) || !std::isfinite(p.wvar)) {
            throw InvalidArgument(kModule, "asset '" + p.asset_id + "' has a nonfinite mean or WV@R");
        }
        if (!(p.risk_weight > 0.0) || !(p.revenue_weight > 0.0) || !std::isfinite(p.risk_weight) ||
            !std::isfinite(p.revenue_weight)) {
            throw InvalidArgument(kModule, "asset '" + p.asset_id + "' needs positive finite weights k and m");
        }
    }
}

void validate_weights(std::span<const AssetProfile> profiles, std::span<const double> x) {
    if (x.size() != profiles.size()) {
        throw InvalidArgument(kModule, "weight vector has " + std::to_string(x.size()) +
                                           " entries for " + std::to_string(profiles.size()) + " assets");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0)) {
            throw InvalidArgument(kModule, "weight " + std::to_string(i) + " is negative (" +
                                               number(x[i]) + ")");
        }
    }
}

void validate_scalarization(const ScalarizationParams& params) {
    if (!(params.risk_aversion >= 0.0) || !std::isfinite(params.risk_aversion)) {
        throw InvalidArgument(kModule, "risk aversion must be finite and nonnegative, got " +
                                           number(params.risk_aversion));
    }
    if (!(params.penalty > 0.0) || !std::isfinite(params.penalty)) {
        throw InvalidArgument(kModule, "penalty J must be finite and positive, got " +
                                           number(params.penalty));
    }
}

Eigen::VectorXd revenue_vector(std::span<const AssetProfile> profiles) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(profiles.size()));
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        m(static_cast<Eigen::Index>(i)) = profiles[i].revenue_weight * profiles[i].mean_return;
    }
    return m;
}

Eigen::VectorXd risk_vector(std::span<const AssetProfile> profiles) {
    Eigen::VectorXd a(static_cast<Eigen::Index>(profiles.size()));
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        a(static_cast<Eigen::Index>(i)) = profiles[i].risk_weight * profiles[i].wvar;
    }
    return a;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> x) {
    return {x.data(), static_cast<Eigen::Index>(x.size())};
}

// KKT residual on the simplex: with nu the mean gradient over the support,
// the gradient must equal nu on the support and be no smaller off it.
double simplex_kkt_residual(const Eigen::VectorXd& grad, std::span<const double> x) {
    double nu = 0.0;
    std::size_t support = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 1e-12) {
            nu += grad(static_cast<Eigen::Index>(i));
            ++support;
        }
    }
    if (support == 0) return std::numeric_limits<double>::infinity();
    nu /= static_cast<double>(support);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double g = grad(static_cast<Eigen::Index>(i));
        worst = std::max(worst, x[i] > 1e-12 ? std::abs(g - nu) : std::max(0.0, nu - g));
    }
    return worst;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::linear: return "lp";
        case Method::quadratic: return "quadratic";
        case Method::mean_variance: return "mean-variance";
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    if (text == "lp") return Method::linear;
    if (text == "quadratic") return Method::quadratic;
    if (text == "mean-variance") return Method::mean_variance;
    throw InvalidArgument(kModule, "method must be lp, quadratic, or mean-variance; got '" +
                                       std::string(text) + "'");
}

double whole_wvar(std::span<const AssetProfile> profiles, std::span<const double> x) {
    validate_weights(profiles, x);
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) total += profiles[i].risk_weight * profiles[i].wvar * x[i];
    return total;
}

double total_revenue(std::span<const AssetProfile> profiles, std::span<const double> x) {
    validate_weights(profiles, x);
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        total += profiles[i].revenue_weight * profiles[i].mean_return * x[i];
    }
    return total;
}

PortfolioSolution solve_linear_scalarization(std::span<const AssetProfile> profiles,
                                             const ScalarizationParams& params) {
    validate_profiles(profiles);
    validate_scalarization(params);
    const auto n = profiles.size();
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = profiles[i];
        scores[i] = -p.revenue_weight * p.mean_return + params.risk_aversion * p.risk_weight * p.wvar;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (scores[i] < scores[best]) best = i;
    }
    PortfolioSolution sol;
    sol.method = Method::linear;
    sol.weights.assign(n, 0.0);
    sol.weights[best] = 1.0;
    sol.projected_weights = sol.weights;
    sol.objective_value = scores[best];
    const Eigen::Map<const Eigen::VectorXd> grad(scores.data(), static_cast<Eigen::Index>(n));
    sol.gradient_residual = simplex_kkt_residual(grad, sol.weights);
    sol.budget_residual = 0.0;
    sol.feasible = true;
    return sol;
}

void validate_penalty(std::span<const AssetProfile> profiles, const ScalarizationParams& params) {
    validate_scalarization(params);
    const auto m = revenue_vector(profiles);
    const auto a = risk_vector(profiles);
    const double scale = std::max(m.cwiseAbs().maxCoeff(), params.risk_aversion * a.cwiseAbs().maxCoeff());
    const double required = 1e6 * scale * scale;
    if (params.penalty < required) {
        throw InvalidArgument(kModule, "penalty J = " + number(params.penalty) +
                                           " is too small for these profiles; need J >= " +
                                           number(required));
    }
}

double weighted_quadratic_objective(std::span<const AssetProfile> profiles,
                                    const ScalarizationParams& params, std::span<const double> x) {
    const auto m = revenue_vector(profiles);
    const auto a = risk_vector(profiles);
    const auto xv = as_eigen(x);
    const double ret = xv.dot(m);
    const double risk = xv.dot(a);
    const double budget = xv.sum() - 1.0;
    return -ret * ret + params.risk_aversion * risk * risk + params.penalty * budget * budget;
}

PortfolioSolution solve_weighted_quadratic(std::span<const AssetProfile> profiles,
                                           const ScalarizationParams& params) {
    validate_profiles(profiles);
    validate_penalty(profiles, params);
    using Eigen::Index;
    const auto n = static_cast<Index>(profiles.size());
    const Eigen::VectorXd mvec = revenue_vector(profiles);
    const Eigen::VectorXd avec = risk_vector(profiles);
    const double risk_aversion = params.risk_aversion;
    const double penalty = params.penalty;

    // Q = S + J cc' with the small block S = -MM' + mAA'. The system is
    // solved in an orthonormal basis whose first vector is c / sqrt(n), so J
    // enters only through a scalar pivot and never pollutes the block of S
    // restricted to the budget hyperplane.
    const Eigen::MatrixXd s = -mvec * mvec.transpose() + risk_aversion * avec * avec.transpose();
    const double s_scale = std::max(s.norm(), std::numeric_limits<double>::min());
    const double rank_tol = 1e-10 * s_scale;

    PortfolioSolution sol;
    sol.method = Method::quadratic;
    Eigen::VectorXd x(n);
    if (n == 1) {
        const double pivot = s(0, 0) + penalty;
        if (pivot == 0.0) throw NumericalError(kModule, "budget pivot vanished for a single asset");
        x(0) = penalty / pivot;
        sol.second_order_ok = pivot >= 0.0;
    } else {
        const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
        const Eigen::MatrixXd basis = qr.householderQ();
        const double c0 = (basis.transpose() * ones)(0, 0);  // +-sqrt(n)
        const Eigen::MatrixXd t = basis.transpose() * s * basis;
        const Eigen::MatrixXd szz = t.bottomRightCorner(n - 1, n - 1);
        const Eigen::VectorXd coupling = t.col(0).tail(n - 1);
        const double pivot = t(0, 0) + penalty * c0 * c0;

        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(szz, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sigma = svd.singularValues();
        Index rank = 0;
        while (rank < sigma.size() && sigma(rank) > rank_tol) ++rank;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n - 1);
        if (rank > 0) {
            const Eigen::VectorXd projected =
                svd.matrixU().leftCols(rank).transpose() * coupling;
            v = svd.matrixV().leftCols(rank) *
                (projected.array() / sigma.head(rank).array()).matrix();
        }
        sol.rank_deficient = rank < n - 1;
        sol.condition_estimate =
            rank == 0 ? 1.0 : sigma(0) / sigma(rank - 1);
        if (sol.rank_deficient) {
            const double inconsistency = (szz * v - coupling).norm();
            if (inconsistency > 1e-8 * s_scale) {
                std::ostringstream msg;
                msg << "stationarity system is singular and inconsistent (condition estimate "
                    << sol.condition_estimate << ", rank " << rank << " of " << n - 1 << ")";
                throw NumericalError(kModule, msg.str());
            }
        }
        const double schur = pivot - coupling.dot(v);
        if (!(std::abs(schur) > 1e-12 * penalty)) {
            std::ostringstream msg;
            msg << "budget pivot vanished (condition estimate " << sol.condition_estimate << ")";
            throw NumericalError(kModule, msg.str());
        }
        const double u = penalty * c0 / schur;
        Eigen::VectorXd w(n);
        w(0) = u;
        w.tail(n - 1) = -u * v;
        x = basis * w;

        // Hessian 2Q is PSD iff the Schur complement of the pivot is.
        const Eigen::MatrixXd reduced = szz - coupling * coupling.transpose() / pivot;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced, Eigen::EigenvaluesOnly);
        sol.second_order_ok = pivot > 0.0 && eig.eigenvalues().minCoeff() >= -rank_tol;
    }
    if (!x.allFinite()) throw NumericalError(kModule, "closed-form weights are not finite");

    sol.weights = to_std(x);
    const double budget = x.sum() - 1.0;
    const Eigen::VectorXd grad = -2.0 * mvec * mvec.dot(x) + 2.0 * risk_aversion * avec * avec.dot(x) +
                                 2.0 * penalty * budget * Eigen::VectorXd::Ones(n);
    sol.gradient_residual = grad.cwiseAbs().maxCoeff();
    sol.budget_residual = std::abs(budget);
    sol.feasible = (x.array() >= 0.0).all();
    sol.objective_value = weighted_quadratic_objective(profiles, params, sol.weights);
    sol.projected_weights = project_to_simplex(sol.weights);
    return sol;
}

std::vector<double> project_to_simplex(std::span<const double> x) {
    if (x.empty()) throw InvalidArgument(kModule, "cannot project an empty vector");
    for (const double v : x) {
        if (!std::isfinite(v)) throw NumericalError(kModule, "cannot project a nonfinite vector");
    }
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double threshold = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cumulative += sorted[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) threshold = candidate;
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::max(x[i] - threshold, 0.0);
    return out;
}

namespace {

void validate_covariance(std::span<const double> means, const Eigen::MatrixXd& cov) {
    const auto n = static_cast<Eigen::Index>(means.size());
    if (n == 0) throw InvalidArgument(kModule, "mean-variance needs at least one asset");
    if (cov.rows() != n || cov.cols() != n) {
        throw InvalidArgument(kModule, "covariance must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (!cov.allFinite()) throw DataError(kModule, "covariance has nonfinite entries");
    for (const double m : means) {
        if (!std::isfinite(m)) throw DataError(kModule, "mean returns must be finite");
    }
    const double scale = std::max(cov.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw DataError(kModule, "covariance is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
        throw DataError(kModule, "covariance is not positive semidefinite (min eigenvalue " +
                                     number(eig.eigenvalues().minCoeff()) + ")");
    }
}

Eigen::VectorXd mean_variance_gradient(const Eigen::VectorXd& r, const Eigen::MatrixXd& cov,
                                       const ScalarizationParams& params, int power,
                                       const Eigen::VectorXd& x) {
    const Eigen::VectorXd cx = cov * x;
    const double variance = x.dot(cx);
    const double risk_slope = power == 1 ? 1.0 : 2.0 * variance;
    const double budget = x.sum() - 1.0;
    return -2.0 * r.dot(x) * r + params.risk_aversion * risk_slope * 2.0 * cx +
           2.0 * params.penalty * budget * Eigen::VectorXd::Ones(x.size());
}

}  // namespace

double mean_variance_objective(std::span<const double> mean_returns, const Eigen::MatrixXd& covariance,
                               const ScalarizationParams& params, int variance_power,
                               std::span<const double> x) {
    const auto r = as_eigen(mean_returns);
    const auto xv = as_eigen(x);
    const double ret = r.dot(xv);
    const double variance = xv.dot(covariance * xv);
    const double risk = variance_power == 1 ? variance : variance * variance;
    const double budget = xv.sum() - 1.0;
    return -ret * ret + params.risk_aversion * risk + params.penalty * budget * budget;
}

PortfolioSolution solve_mean_variance(std::span<const double> mean_returns,
                                      const Eigen::MatrixXd& covariance,
                                      const ScalarizationParams& params, int variance_power) {
    validate_scalarization(params);
    validate_covariance(mean_returns, covariance);
    if (variance_power != 1 && variance_power != 2) {
        throw InvalidArgument(kModule, "variance power must be 1 or 2, got " +
                                           std::to_string(variance_power));
    }
    const auto n = mean_returns.size();
    auto objective = [&](std::span<const double> x) {
        return mean_variance_objective(mean_returns, covariance, params, variance_power, x);
    };

    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    if (n == 2) {
        // Coarse scan of x_1 in [0, 1], then golden-section refinement around
        // the best cell.
        constexpr int kCells = 1000;
        auto f1 = [&](double t) {
            const double pt[2] = {t, 1.0 - t};
            return objective(pt);
        };
        int best = 0;
        double best_value = f1(0.0);
        for (int i = 1; i <= kCells; ++i) {
            const double v = f1(static_cast<double>(i) / kCells);
            if (v < best_value) {
                best_value = v;
                best = i;
            }
        }
        double lo = std::max(0.0, static_cast<double>(best - 1) / kCells);
        double hi = std::min(1.0, static_cast<double>(best + 1) / kCells);
        const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
        double p = hi - ratio * (hi - lo);
        double q = lo + ratio * (hi - lo);
        double fp = f1(p);
        double fq = f1(q);
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            if (fp <= fq) {
                hi = q;
                q = p;
                fq = fp;
                p = hi - ratio * (hi - lo);
                fp = f1(p);
            } else {
                lo = p;
                p = q;
                fp = fq;
                q = lo + ratio * (hi - lo);
                fq = f1(q);
            }
        }
        double t = 0.5 * (lo + hi);
        // The scan grid may hold a better point when the objective is flat.
        if (f1(static_cast<double>(best) / kCells) < f1(t)) t = static_cast<double>(best) / kCells;
        x = {t, 1.0 - t};
    } else if (n > 2) {
        const Eigen::Map<const Eigen::VectorXd> r(mean_returns.data(), static_cast<Eigen::Index>(n));
        double step = 0.0;
        double fx = objective(x);
        for (int it = 0; it < 20000; ++it) {
            const Eigen::VectorXd g =
                mean_variance_gradient(r, covariance, params, variance_power, as_eigen(x));
            const double gmax = g.cwiseAbs().maxCoeff();
            if (gmax == 0.0) break;
            step = step == 0.0 ? 0.1 / gmax : 2.0 * step;
            std::vector<double> trial;
            double ft = fx;
            bool accepted = false;
            for (int ls = 0; ls < 80; ++ls) {
                std::vector<double> shifted(n);
                for (std::size_t i = 0; i < n; ++i) shifted[i] = x[i] - step * g(static_cast<Eigen::Index>(i));
                trial = project_to_simplex(shifted);
                const Eigen::VectorXd dx = as_eigen(trial) - as_eigen(x);
                ft = objective(trial);
                if (ft <= fx + 1e-4 * g.dot(dx)) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
            const double moved = (as_eigen(trial) - as_eigen(x)).cwiseAbs().maxCoeff();
            x = std::move(trial);
            fx = ft;
            if (moved < 1e-13) break;
        }
    }

    const Eigen::Map<const Eigen::VectorXd> r(mean_returns.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd g = mean_variance_gradient(r, covariance, params, variance_power, as_eigen(x));
    PortfolioSolution sol;
    sol.method = Method::mean_variance;
    sol.weights = x;
    sol.projected_weights = x;
    sol.objective_value = objective(x);
    sol.gradient_residual = simplex_kkt_residual(g, x);
    sol.budget_residual = std::abs(std::accumulate(x.begin(), x.end(), 0.0) - 1.0);
    sol.feasible = std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0; });
    return sol;
}

}  // namespace wvar
