#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace wvar {

struct AssetProfile {
    std::string asset_id;
    double mean_return = 0.0;
    double wvar = 0.0;
    double risk_weight = 1.0;
    double revenue_weight = 1.0;
};

struct ScalarizationParams {
    double risk_aversion = 1.0;
    double penalty = 1e12;
};

enum class Method { linear, quadratic, mean_variance };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);

struct PortfolioSolution {
    Method method = Method::linear;
    /// Solver output. For the quadratic method this is the unconstrained
    /// stationary point and may leave the simplex.
    std::vector<double> weights;
    /// Euclidean projection of `weights` onto the simplex.
    std::vector<double> projected_weights;
    double objective_value = 0.0;
    double gradient_residual = 0.0;
    double budget_residual = 0.0;
    bool feasible = true;
    /// Quadratic method: whether the Hessian is positive semidefinite at the
    /// stationary point. A false value flags a saddle.
    bool second_order_ok = true;
    /// Quadratic method: condition number of the risk/return block restricted
    /// to the budget hyperplane, and whether that block was rank deficient.
    double condition_estimate = 1.0;
    bool rank_deficient = false;
};

/// sum k_i WV@R_i x_i.
double whole_wvar(std::span<const AssetProfile> profiles, std::span<const double> x);
/// sum m_i R_i x_i.
double total_revenue(std::span<const AssetProfile> profiles, std::span<const double> x);

/// min -sum m_i R_i x_i + m sum k_i WV@R_i x_i over the simplex. The optimum is
/// the vertex with the smallest per-asset score; ties go to the lowest index.
PortfolioSolution solve_linear_scalarization(std::span<const AssetProfile> profiles,
                                             const ScalarizationParams& params);

/// Stationary point of -(X'M)^2 + m (X'A)^2 + J (c'X - 1)^2, i.e. the solution
/// of (-MM' + mAA' + Jcc') X = Jc with M_i = m_i R_i, A_i = k_i WV@R_i, c = 1.
PortfolioSolution solve_weighted_quadratic(std::span<const AssetProfile> profiles,
                                           const ScalarizationParams& params);

/// Value of the quadratic objective at x.
double weighted_quadratic_objective(std::span<const AssetProfile> profiles,
                                    const ScalarizationParams& params,
                                    std::span<const double> x);

/// Euclidean projection onto {x : sum x_i = 1, x_i >= 0}.
std::vector<double> project_to_simplex(std::span<const double> x);

/// min -(R'x)^2 + m Var(x)^p + J (c'x - 1)^2 over the simplex, where
/// Var(x) = x' Cov x and p is 1 or 2.
PortfolioSolution solve_mean_variance(std::span<const double> mean_returns,
                                      const Eigen::MatrixXd& covariance,
                                      const ScalarizationParams& params, int variance_power = 2);

double mean_variance_objective(std::span<const double> mean_returns,
                               const Eigen::MatrixXd& covariance,
                               const ScalarizationParams& params, int variance_power,
                               std::span<const double> x);

/// Checks the conditioning requirement on the penalty:
/// J >= 1e6 * max(|M_i|, m |A_i|)^2.
void validate_penalty(std::span<const AssetProfile> profiles, const ScalarizationParams& params);

}  // namespace wvar
