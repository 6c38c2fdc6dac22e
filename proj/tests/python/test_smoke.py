import math
import os

import pytest

import wvar

DATA_DIR = os.environ.get("WVAR_TEST_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "data"))
FOUR = [-3.0, -1.0, 0.0, 2.0]


def test_quadrature():
    assert wvar.composite_simpson(lambda x: x * x, 0.0, 1.0, 2) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert wvar.half_node_simpson(lambda x: x**3, 0.0, 1.0, 1) == pytest.approx(0.25, abs=1e-15)
    with pytest.raises(ValueError):
        wvar.composite_simpson(lambda x: x, 0.0, 1.0, 3)


def test_risk_measures():
    assert wvar.value_at_risk(FOUR, 0.05) == 3.0
    assert wvar.tail_var_exact(FOUR, 0.25) == 3.0
    assert wvar.tail_var_exact(FOUR, 0.5) == 2.0
    assert wvar.worst_case_loss(FOUR) == 3.0
    assert wvar.weighted_var_uniform_closed_form(FOUR) == pytest.approx(1.9712, abs=1e-4)
    assert abs(wvar.weighted_var(FOUR) - 1.9712) <= 0.02
    atom = wvar.WeightingMeasure.atoms([(0.05, 1.0)])
    assert wvar.weighted_var(FOUR, atom) == wvar.tail_var_exact(FOUR, 0.05)
    report = wvar.risk_report(FOUR, 0.05)
    assert report["tvar"] >= report["var"]


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError, match="level"):
        wvar.value_at_risk(FOUR, 1.5)
    with pytest.raises(wvar.DataError):
        wvar.load_returns("/no/such/prices.csv")
    with pytest.raises(ValueError):
        wvar.EmpiricalDistribution([])


def test_returns_and_backtest():
    assert wvar.simple_returns([100.0, 110.0, 99.0]) == pytest.approx([0.10, -0.10])
    series = wvar.load_returns(os.path.join(DATA_DIR, "two_etfs.csv"))
    assert [s.asset_id for s in series] == ["SPY", "AGG"]
    review = wvar.run_review_test(series[0], window_length=250, level=0.05)
    assert set(review) == {"var", "tvar", "wvar"}
    assert review["tvar"]["failures"] <= review["var"]["failures"]
    assert review["var"]["total_tests"] == len(series[0]) - 250


def test_portfolio():
    a = wvar.AssetProfile("A", 0.002, 0.001)
    b = wvar.AssetProfile("B", 0.001, 0.003)
    assert wvar.solve_linear_scalarization([a, b], 1.0)["weights"] == [1.0, 0.0]
    twins = [wvar.AssetProfile("A", 0.001, 0.02), wvar.AssetProfile("B", 0.001, 0.02)]
    sol = wvar.solve_weighted_quadratic(twins, 1.0, 1e8)
    assert sol["weights"] == pytest.approx([0.5, 0.5], abs=1e-6)
    assert wvar.project_to_simplex([1.5, -0.5]) == [1.0, 0.0]
    mv = wvar.solve_mean_variance([0.0005, 0.0005], [[1e-4, 0.0], [0.0, 1e-4]], 1e4, 1e12)
    assert mv["weights"] == pytest.approx([0.5, 0.5], abs=1e-6)
    assert wvar.whole_wvar(twins, [0.5, 0.5]) == pytest.approx(0.02)


def test_rebalance():
    series = wvar.load_returns(os.path.join(DATA_DIR, "two_etfs.csv"))
    out = wvar.run_rebalance(series, "mean-wvar", 1.0)
    assert len(out["monthly_weights"]) == 57
    month, weights = out["monthly_weights"][0]
    assert month == "2008-01"
    assert math.isclose(sum(weights), 1.0, abs_tol=1e-12)
    with pytest.raises(ValueError):
        wvar.run_rebalance(series, "bogus", 1.0)
