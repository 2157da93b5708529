import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import DomainError
from geometry import Direction, RayKind, a_k, o_k
from variational import (
    ClassKind,
    ExtremalClass,
    Line,
    classify_horizontal,
    classify_line,
    critical_slope_table,
    entropy,
    grid_maximizer,
    line_report,
    nearest_critical_slope,
    objective,
    predict_direction,
    razborov_minimizer,
    retention_probability,
    solve_scalar,
    turan_class,
)


def test_entropy_values():
    assert entropy(0) == 0
    assert entropy(1) == 0
    assert entropy(0.5) == pytest.approx(-math.log(2) / 2)
    with pytest.raises(DomainError):
        entropy(1.5)


def test_entropy_symmetric_and_convex():
    u = np.linspace(0.0, 1.0, 10 ** 4)
    values = np.array([entropy(x) for x in u])
    assert np.allclose(values, values[::-1], atol=1e-15)
    assert np.min(np.diff(values, 2)) >= -1e-15


def test_solve_scalar_at_zero():
    sol = solve_scalar(0, 0)
    assert sol.maximizers == pytest.approx((0.5,))


def test_solve_scalar_logistic_closed_form():
    sol = solve_scalar(10, 0)
    assert len(sol.maximizers) == 1
    assert sol.maximizers[0] == pytest.approx(math.exp(20) / (1 + math.exp(20)), abs=1e-9)


def test_solve_scalar_attractive_tie():
    sol = solve_scalar(-1e4, 1e4)
    assert len(sol.maximizers) == 2
    low, high = sol.maximizers
    assert low == pytest.approx(0.0, abs=1e-3)
    assert high == pytest.approx(1.0, abs=1e-3)
    assert abs(objective(low, -1e4, 1e4) - objective(high, -1e4, 1e4)) < 1e-6


@pytest.mark.parametrize("a, b, target", [(-0.5, 0, 1.0), (-1, 1, 1.0), (-2, 0, 0.0), (-1, -1, 0.0)])
def test_attractive_regime(a, b, target):
    beta2 = 1e4
    sol = solve_scalar(a * beta2 + b, beta2)
    assert len(sol.maximizers) == 1
    assert sol.maximizers[0] == pytest.approx(target, abs=1e-3)


def test_attractive_regime_monotone_approach():
    maximizers = [solve_scalar(-0.5 * beta2 + 1, beta2).maximizers[-1] for beta2 in (1e2, 1e3, 1e4)]
    assert maximizers[0] <= maximizers[1] <= maximizers[2]
    assert maximizers[2] == pytest.approx(1.0, abs=1e-3)


@given(st.floats(-50, 50), st.floats(-50, 50))
@settings(max_examples=100, deadline=None)
def test_solve_scalar_dominates_grid(beta1, beta2):
    u = np.linspace(0.0, 1.0, 10 ** 4)
    grid = max(objective(float(x), beta1, beta2) for x in u[::50])
    assert solve_scalar(beta1, beta2).value >= grid - 1e-9


def test_grid_maximizer_agrees():
    u, value = grid_maximizer(2.0, -3.0, points=10 ** 5)
    sol = solve_scalar(2.0, -3.0)
    assert sol.value >= value - 1e-12
    assert u == pytest.approx(sol.maximizers[0], abs=1e-4)


@pytest.mark.parametrize("line, expected", [
    (Line(-2, 5, -1), "TuranClass(4)"),
    (Line(0, 0, -1), "DilutedBipartite(0.5)"),
    (Line(Fraction(-4, 3), -1, -1), "TuranClass(2)"),
    (Line(Fraction(-4, 3), 1, -1), "TuranClass(3)"),
    (Line(Fraction(-4, 3), 0, -1), "TuranPair(2,3)"),
    (Line(1, 0, -1), "Empty"),
    (Line(-3, 0, -1), "Complete"),
    (Line(-1, 0, 1), "EmptyOrComplete"),
    (Line(-1, 2, 1), "Complete"),
    (Line(-1, -2, 1), "Empty"),
    (Line(-0.5, -7, 1), "Complete"),
    (Line(-1.5, 7, 1), "Empty"),
])
def test_classify_line(line, expected):
    assert classify_line(line).label() == expected


def test_classify_line_float_near_critical():
    # within 1e-12 of a_1 counts as critical
    assert classify_line(Line(float(a_k(1)) + 1e-14, 0.0, -1)).kind == ClassKind.TURAN_PAIR
    assert classify_line(Line(float(a_k(1)) + 1e-6, 0.0, -1)).label() == "TuranClass(2)"


def test_classify_line_diluted_bipartite_probability():
    cls = classify_line(Line(0, 1, -1))
    assert cls.p == pytest.approx(math.exp(2) / (1 + math.exp(2)))


def test_line_rejects_bad_limit():
    with pytest.raises(DomainError):
        Line(0, 0, 0)
    with pytest.raises(DomainError):
        Line(float("nan"), 0, 1)


def test_classify_horizontal():
    assert classify_horizontal(1).kind == ClassKind.COMPLETE
    assert classify_horizontal(-1).kind == ClassKind.EMPTY


def test_razborov_minimizer():
    assert razborov_minimizer(-0.5) == (Fraction(1, 2),)
    assert razborov_minimizer(Fraction(-4, 3)) == (Fraction(1, 2), Fraction(2, 3))
    assert razborov_minimizer(-2.5) == (Fraction(7, 8),)
    assert razborov_minimizer(-3) == (Fraction(1),)
    with pytest.raises(DomainError):
        razborov_minimizer(0)


def test_minimizer_denominator_is_class_count():
    rng = np.random.default_rng(4)
    for a in rng.uniform(-2.99, -0.01, 300):
        k, distance = nearest_critical_slope(float(a))
        if distance < 1e-9:
            continue
        (e,) = razborov_minimizer(float(a))
        assert classify_line(Line(float(a), 0.0, -1)) == turan_class(e.denominator)


def test_nearest_critical_slope():
    assert nearest_critical_slope(Fraction(-4, 3)) == (1, 0.0)
    k, distance = nearest_critical_slope(-1.9)
    assert k == 2
    assert distance == pytest.approx(1.9 - 11 / 6)
    with pytest.raises(DomainError):
        nearest_critical_slope(-3)


def test_line_report_json_shape():
    report = line_report(Line(Fraction(-4, 3), -1, -1))
    assert report["input"] == {"a": "-4/3", "b": -1, "limit": "-inf"}
    assert report["class"] == "TuranClass(2)"
    assert report["parameters"] == {"r": 2}
    assert report["nearest_critical"]["k"] == 1


def test_extremal_class_validation():
    with pytest.raises(DomainError):
        ExtremalClass(ClassKind.TURAN, r=1)
    with pytest.raises(DomainError):
        ExtremalClass(ClassKind.DILUTED_BIPARTITE, p=1.0)
    assert ExtremalClass(ClassKind.TURAN_PAIR, r=3).class_counts == (3, 4)


def test_retention_probability():
    assert retention_probability(0) == 0.5
    assert retention_probability(1) == pytest.approx(math.exp(2) / (1 + math.exp(2)))


@pytest.mark.parametrize("direction, beta, expected", [
    (Direction(1, Fraction(-1, 2)), None, "TuranClass(4)"),
    (o_k(1), (20, -80), "TuranClass(2)"),
    (o_k(1), (0, 0), "TuranClass(3)"),
    (o_k(1), (10, -6), "TuranClass(3)"),
    (o_k(1), None, "TuranPair(2,3)"),
    (o_k(0), (0, 0), "DilutedBipartite(0.5)"),
    (o_k(-1), (1, -2), "Empty"),
    (o_k(-1), (2, -1), "Complete"),
    (o_k(-1), (1, -1), "Complete"),
    (o_k(-1), None, "EmptyOrComplete"),
    (Direction(-1, -1), None, "Empty"),
    (Direction(1, 1), None, "Complete"),
])
def test_predict_direction(direction, beta, expected):
    assert predict_direction(direction, beta).extremal.label() == expected


def test_predict_direction_reports_side():
    prediction = predict_direction(o_k(1), (20, -80))
    assert prediction.classification.kind == RayKind.CRITICAL_RAY
    assert prediction.side == -1
    assert prediction.to_dict()["side"] == "-"


def test_critical_slope_table():
    table = critical_slope_table(2)
    assert [row["a_k"] for row in table] == ["0", "-4/3", "-11/6"]
