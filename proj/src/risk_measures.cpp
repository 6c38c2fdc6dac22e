#include "wvar/risk_measures.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wvar/error.hpp"
#include "wvar/quadrature.hpp"

namespace wvar {
namespace {

constexpr const char* kModule = "risk_measures";

std::string number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double parse_number(std::string_view text, std::string_view what) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw InvalidArgument(kModule, "cannot parse " + std::string(what) + " '" +
                                           std::string(text) + "'");
    }
    return v;
}

}  // namespace

WeightingMeasure WeightingMeasure::uniform() { return {}; }

WeightingMeasure WeightingMeasure::from_atoms(std::vector<Atom> atoms) {
    WeightingMeasure m;
    m.kind_ = Kind::atoms;
    m.atoms_ = std::move(atoms);
    m.validate();
    return m;
}

WeightingMeasure WeightingMeasure::from_density(std::vector<double> grid_values) {
    WeightingMeasure m;
    m.kind_ = Kind::density;
    m.density_ = std::move(grid_values);
    m.validate();
    return m;
}

WeightingMeasure WeightingMeasure::parse(std::string_view text) {
    if (text == "uniform") return uniform();
    if (text.starts_with("atom:")) {
        const double level = parse_number(text.substr(5), "atom level");
        return from_atoms({{level, 1.0}});
    }
    std::ifstream in{std::string(text)};
    if (!in) {
        throw InvalidArgument(kModule, "measure must be 'uniform', 'atom:<level>', or a readable "
                                       "density file; cannot open '" + std::string(text) + "'");
    }
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            const auto e = cell.find_last_not_of(" \t\r");
            values.push_back(parse_number(std::string_view(cell).substr(b, e - b + 1), "density value"));
        }
    }
    try {
        return from_density(std::move(values));
    } catch (const DataError& e) {
        throw DataError(kModule, std::string(text) + ": " + e.what());
    }
}

void WeightingMeasure::validate() const {
    switch (kind_) {
        case Kind::uniform:
            return;
        case Kind::atoms: {
            if (atoms_.empty()) throw InvalidArgument(kModule, "atom measure needs at least one atom");
            double total = 0.0;
            for (const auto& a : atoms_) {
                if (!(a.level > 0.0 && a.level <= 1.0)) {
                    throw InvalidArgument(kModule, "atom level must lie in (0, 1], got " + number(a.level));
                }
                if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
                    throw InvalidArgument(kModule, "atom weight must be positive, got " + number(a.weight));
                }
                total += a.weight;
            }
            if (std::abs(total - 1.0) > 1e-12) {
                throw InvalidArgument(kModule, "atom weights must sum to 1, got " + number(total));
            }
            return;
        }
        case Kind::density: {
            const auto points = density_.size();
            if (points < 3 || points % 2 == 0) {
                throw DataError(kModule, "density grid needs an odd number of points (>= 3), got " +
                                             std::to_string(points));
            }
            for (const double v : density_) {
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    throw DataError(kModule, "density values must be finite and nonnegative");
                }
            }
            const double mass = simpson_on_samples(density_, 0.0, 1.0);
            if (std::abs(mass - 1.0) > 1e-9) {
                throw DataError(kModule, "density must integrate to 1 under Simpson, got " + number(mass));
            }
            return;
        }
    }
}

std::string WeightingMeasure::describe() const {
    switch (kind_) {
        case Kind::uniform:
            return "uniform";
        case Kind::atoms: {
            std::string out = "atoms";
            for (const auto& a : atoms_) out += ":" + number(a.level) + "@" + number(a.weight);
            return out;
        }
        case Kind::density:
            return "density(" + std::to_string(density_.size()) + " points)";
    }
    return {};
}

void validate_level_open(double level, std::string_view what) {
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidArgument(kModule, std::string(what) + " must lie in (0, 1), got " + number(level));
    }
}

double value_at_risk(const EmpiricalDistribution& dist, double level) {
    validate_level_open(level);
    return -dist.quantile(level);
}

double tail_var_exact(const EmpiricalDistribution& dist, double level) {
    if (!(level > 0.0 && level <= 1.0)) {
        throw InvalidArgument(kModule, "tail V@R level must lie in (0, 1], got " + number(level));
    }
    return -dist.lower_partial_integral(level) / level;
}

double tail_var_simpson(const EmpiricalDistribution& dist, double level, std::size_t inner_panels) {
    if (!(level > 0.0 && level <= 1.0)) {
        throw InvalidArgument(kModule, "tail V@R level must lie in (0, 1], got " + number(level));
    }
    const SimpsonGrid grid(0.0, level, inner_panels);
    const double integral =
        composite_simpson([&](double s) { return dist.quantile_closed(s); }, grid);
    return -integral / level;
}

double worst_case_loss(const EmpiricalDistribution& dist) { return -dist.min(); }

double weighted_var(const EmpiricalDistribution& dist, const WeightingMeasure& measure,
                    std::size_t outer_panels) {
    measure.validate();
    auto tail = [&](double level) {
        return level == 0.0 ? worst_case_loss(dist) : tail_var_exact(dist, level);
    };
    switch (measure.kind()) {
        case WeightingMeasure::Kind::uniform:
            return half_node_simpson(tail, 0.0, 1.0, outer_panels);
        case WeightingMeasure::Kind::atoms: {
            double total = 0.0;
            for (const auto& a : measure.atoms()) total += a.weight * tail_var_exact(dist, a.level);
            return total;
        }
        case WeightingMeasure::Kind::density: {
            const auto& rho = measure.density();
            const SimpsonGrid grid(0.0, 1.0, rho.size() - 1);
            std::vector<double> weighted(rho.size());
            for (std::size_t k = 0; k < rho.size(); ++k) weighted[k] = rho[k] * tail(grid.node(k));
            return simpson_on_samples(weighted, 0.0, 1.0);
        }
    }
    return 0.0;
}

double weighted_var_uniform_closed_form(const EmpiricalDistribution& dist) {
    const auto x = dist.sorted_samples();
    const double n = static_cast<double>(x.size());
    auto antiderivative = [](double s) { return s > 0.0 ? s - s * std::log(s) : 0.0; };
    double total = 0.0;
    double previous = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double current = antiderivative(static_cast<double>(k + 1) / n);
        total += x[k] * (current - previous);
        previous = current;
    }
    return -total;
}

RiskReport make_risk_report(const EmpiricalDistribution& dist, double level,
                            const WeightingMeasure& measure, std::size_t outer_panels) {
    RiskReport report;
    report.level = level;
    report.var = value_at_risk(dist, level);
    report.tvar = tail_var_exact(dist, level);
    report.wvar = weighted_var(dist, measure, outer_panels);
    report.measure = measure;
    report.n_samples = dist.size();
    return report;
}

}  // namespace wvar
