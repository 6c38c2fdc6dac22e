#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "wvar/empirical_dist.hpp"

namespace wvar {

// Every measure here is loss-positive: a positive value is a loss.

inline constexpr std::size_t kDefaultInnerPanels = 128;
inline constexpr std::size_t kDefaultOuterPanels = 64;

/// The mixing measure over tail levels used by Weighted-V@R.
///
/// * uniform: Lebesgue measure on [0, 1].
/// * atoms: finitely many levels in (0, 1] with weights summing to one.
/// * density: values on a uniform grid over [0, 1] (an odd number of points,
///   so the grid supports Simpson) integrating to one.
class WeightingMeasure {
public:
    enum class Kind { uniform, atoms, density };

    struct Atom {
        double level;
        double weight;
    };

    static WeightingMeasure uniform();
    static WeightingMeasure from_atoms(std::vector<Atom> atoms);
    static WeightingMeasure from_density(std::vector<double> grid_values);

    /// "uniform", "atom:<level>", or a path to a density file (one value per
    /// line or comma separated).
    static WeightingMeasure parse(std::string_view text);

    Kind kind() const noexcept { return kind_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    const std::vector<double>& density() const noexcept { return density_; }

    void validate() const;
    std::string describe() const;

private:
    Kind kind_ = Kind::uniform;
    std::vector<Atom> atoms_;
    std::vector<double> density_;
};

/// -q(level) for level in (0, 1).
double value_at_risk(const EmpiricalDistribution& dist, double level);

/// -(1/level) * integral_0^level q(s) ds, integrated exactly on the step
/// quantile, level in (0, 1]. At level 1 this is minus the sample mean.
double tail_var_exact(const EmpiricalDistribution& dist, double level);

/// Same integral by composite Simpson on `inner_panels` subintervals.
double tail_var_simpson(const EmpiricalDistribution& dist, double level,
                        std::size_t inner_panels = kDefaultInnerPanels);

/// Limit of tail V@R as the level goes to zero: minus the smallest sample.
double worst_case_loss(const EmpiricalDistribution& dist);

/// integral of tail_var_exact(dist, level) against `measure`. The uniform case
/// uses the half-node Simpson rule over [0, 1] with `outer_panels` panels,
/// with the level-0 node set to worst_case_loss.
double weighted_var(const EmpiricalDistribution& dist, const WeightingMeasure& measure,
                    std::size_t outer_panels = kDefaultOuterPanels);

/// Exact uniform Weighted-V@R: -sum x_(k) [F(k/n) - F((k-1)/n)], F(s) = s - s ln s.
double weighted_var_uniform_closed_form(const EmpiricalDistribution& dist);

struct RiskReport {
    double var = 0.0;
    double tvar = 0.0;
    double wvar = 0.0;
    double level = 0.05;
    WeightingMeasure measure;
    std::size_t n_samples = 0;
};

RiskReport make_risk_report(const EmpiricalDistribution& dist, double level,
                            const WeightingMeasure& measure,
                            std::size_t outer_panels = kDefaultOuterPanels);

void validate_level_open(double level, std::string_view what = "level");

}  // namespace wvar
