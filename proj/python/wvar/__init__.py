"""Weighted-V@R risk measures, review testing and portfolio selection."""

from ._core import (
    AssetProfile,
    DataError,
    EmpiricalDistribution,
    NumericalError,
    ReturnSeries,
    WeightingMeasure,
    composite_simpson,
    half_node_simpson,
    load_returns,
    project_to_simplex,
    risk_report,
    run_rebalance,
    run_review_test,
    simple_returns,
    solve_linear_scalarization,
    solve_mean_variance,
    solve_weighted_quadratic,
    tail_var_exact,
    tail_var_simpson,
    total_revenue,
    value_at_risk,
    weighted_var,
    weighted_var_uniform_closed_form,
    whole_wvar,
    worst_case_loss,
)

__all__ = [name for name in dir() if not name.startswith("_")]
