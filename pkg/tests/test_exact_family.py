import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import DomainError, FeasibilityError
from exact_family import (
    closure_convergence_check,
    closure_two_point,
    convex_hull,
    convex_support,
    edge_complete_family,
    enumerate_support,
    exact_family,
    expected_face,
    exposed_face,
    face_family,
    hull_contains_strictly,
    log_nu_turan,
    log_partition,
    non_turan_mass,
    nu_turan,
    psi_n,
    ratio_trend,
    stirling_log_constant,
    support_on_segment,
    triangle_free_census,
    triangle_free_family,
    turan_vertices,
    tv_distance,
)
from geometry import Direction, kk_upper, o_k, o_minus_one_n, razborov_lower, v_k
from graph_core import DensityPoint, turan_counts, turan_densities
from verify import turan_isomorphic_counts


def point(e, t):
    return DensityPoint(Fraction(e), Fraction(t))


def test_enumerate_n3(support_tables):
    assert support_tables[3].counts == {(0, 0): 1, (1, 0): 3, (2, 0): 3, (3, 1): 1}


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_enumeration_total_mass(support_tables, n):
    assert support_tables[n].total() == 2 ** (n * (n - 1) // 2)


def test_n6_hull_and_counts(support_tables):
    table = support_tables[6]
    assert convex_support(table) == [point(0, 0), point(Fraction(1, 2), 0),
                                     point(Fraction(2, 3), Fraction(2, 9)), point(Fraction(5, 6), Fraction(5, 9))]
    assert table.count_at(v_k(1)) == 10 == nu_turan(6, 2)
    assert table.count_at(v_k(2)) == 15 == nu_turan(6, 3)
    assert support_on_segment(table, v_k(1), v_k(2)) == [v_k(1), v_k(2)]
    assert set(turan_vertices(6)) == set(convex_support(table))


def test_n4_hull_drops_collinear_turan_point(support_tables):
    table = support_tables[4]
    assert convex_support(table) == [point(0, 0), point(Fraction(1, 2), 0), point(Fraction(3, 4), Fraction(3, 8))]
    t43 = turan_densities(4, 3)
    assert t43 == point(Fraction(5, 8), Fraction(3, 16))
    assert t43 in support_on_segment(table, point(Fraction(1, 2), 0), point(Fraction(3, 4), Fraction(3, 8)))


def test_convex_hull_small_inputs():
    assert convex_hull([point(0, 0)]) == [point(0, 0)]
    square = [point(0, 0), point(1, 0), point(1, 1), point(0, 1), point(Fraction(1, 2), 0)]
    assert convex_hull(square) == [point(0, 0), point(1, 0), point(1, 1), point(0, 1)]
    assert hull_contains_strictly(convex_hull(square), (0.5, 0.5))
    assert not hull_contains_strictly(convex_hull(square), (0.5, 0.0))


def test_support_densities_lie_between_boundary_curves(support_tables):
    for n, table in support_tables.items():
        for p in table.entries():
            assert float(razborov_lower(p.e)) - 1e-12 <= float(p.t) <= float(kk_upper(p.e)) + 1e-12


def test_support_entries(support_tables):
    entries = support_tables[3].entries()
    assert entries == {
        point(0, 0): 1,
        point(Fraction(2, 9), 0): 3,
        point(Fraction(4, 9), 0): 3,
        point(Fraction(2, 3), Fraction(2, 9)): 1,
    }


def test_mean_at_zero_is_interior(support_tables):
    hull = convex_support(support_tables[6])
    assert hull_contains_strictly(hull, exact_family(support_tables[6], (0, 0)).mean())


@given(
    st.integers(3, 6),
    st.floats(min_value=-1, max_value=1),
    st.floats(min_value=-1, max_value=1),
)
@settings(max_examples=100, deadline=None)
def test_mean_value_parameter_is_interior(support_tables, n, b1, b2):
    table = support_tables[n]
    assert hull_contains_strictly(convex_support(table), exact_family(table, (b1, b2)).mean())


@pytest.mark.parametrize("beta", [(0.0, 0.0), (0.7, -1.2), (-2.0, 3.0), (1.5, 0.5)])
def test_psi_is_convex(support_tables, beta):
    table = support_tables[5]
    h = 1e-4
    basis = np.eye(2) * h

    def psi(shift):
        return psi_n(table, (beta[0] + shift[0], beta[1] + shift[1]))

    hessian = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            di, dj = basis[i], basis[j]
            hessian[i, j] = (psi(di + dj) - psi(di - dj) - psi(-di + dj) + psi(-di - dj)) / (4 * h * h)
    assert np.allclose(hessian, hessian.T, atol=1e-6)
    assert np.min(np.linalg.eigvalsh(hessian)) > -1e-6


def test_enumeration_caps(isolated_env, monkeypatch):
    with pytest.raises(FeasibilityError):
        enumerate_support(9)
    with pytest.raises(FeasibilityError, match="allow_long"):
        enumerate_support(8)
    with pytest.raises(FeasibilityError):
        enumerate_support(1)
    monkeypatch.setenv("TURAN_ENUM_CAP", "5")
    with pytest.raises(FeasibilityError):
        enumerate_support(6)


@pytest.mark.slow
def test_parallel_enumeration_matches_serial():
    serial = enumerate_support(7, workers=1)
    parallel = enumerate_support(7, workers=2)
    assert parallel.counts == serial.counts
    assert serial.total() == 2 ** 21


def test_nu_turan_against_brute_force():
    for n in range(2, 6):
        brute = turan_isomorphic_counts(n)
        for r in range(1, n + 1):
            assert nu_turan(n, r) == brute.get(r, 0)


def test_nu_turan_values():
    assert nu_turan(6, 2) == 10
    assert nu_turan(6, 3) == 15
    assert nu_turan(6, 1) == 1
    assert nu_turan(6, 6) == 1
    assert log_nu_turan(40, 3) == pytest.approx(math.log(nu_turan(40, 3)), rel=1e-12)


def test_exact_family_at_zero_is_uniform(support_tables):
    table = support_tables[6]
    fam = exact_family(table, (0, 0))
    assert fam.log_normalizer == pytest.approx(15 * math.log(2))
    assert psi_n(table, (0, 0)) == pytest.approx(15 * math.log(2) / 36)
    assert fam.prob((15, 20)) == pytest.approx(2.0 ** -15)
    assert fam.prob(turan_densities(6, 3)) == pytest.approx(15 * 2.0 ** -15)
    assert math.fsum(fam.distribution().values()) == pytest.approx(1.0)


def test_exact_family_is_stable_for_large_parameters(support_tables):
    fam = exact_family(support_tables[6], (500, -900))
    assert math.isfinite(log_partition(support_tables[6], (500, -900)))
    assert math.fsum(fam.distribution().values()) == pytest.approx(1.0)


def test_mean_edge_fraction_under_strong_edges(support_tables):
    fam = exact_family(support_tables[5], (5, 0))
    e_mean, _ = fam.mean()
    # homomorphism density 2E/n^2 tops out at (n-1)/n; the edge fraction is E/C(n,2)
    assert e_mean * 25 / 20 > 0.99


def test_two_point_family_at_zero():
    fam = closure_two_point(6, 1, (0, 0))
    assert fam.counts == (10, 15)
    assert fam.probs == pytest.approx((0.4, 0.6))


def test_two_point_family_on_positive_side(support_tables):
    fam = closure_two_point(6, 1, (10, -6), table=support_tables[6])
    assert fam.reduced == 2
    assert fam.log_ratio == pytest.approx(12 + math.log(1.5))
    assert fam.probs[1] == pytest.approx(0.999996, abs=1e-6)
    assert fam.probs[1] > 0.9999


def test_two_point_family_depends_on_reduced_parameter_only():
    base = closure_two_point(12, 1, (3, 1))
    shifted = closure_two_point(12, 1, (3 + 4 * 7, 1 - 3 * 7))  # beta + 7*(4, -3), along o_1
    assert shifted.reduced == base.reduced
    assert shifted.probs == base.probs


@given(
    st.sampled_from([1, 2]),
    st.fractions(min_value=-20, max_value=20, max_denominator=1000),
    st.fractions(min_value=-20, max_value=20, max_denominator=1000),
    st.fractions(min_value=-50, max_value=50, max_denominator=1000),
)
@settings(max_examples=100, deadline=None)
def test_two_point_family_is_invariant_along_o_k(k, b1, b2, c):
    o = o_k(k)
    base = closure_two_point(12, k, (b1, b2))
    shifted = closure_two_point(12, k, (b1 + c * o.x, b2 + c * o.y))
    assert shifted.reduced == base.reduced
    assert shifted.log_ratio == base.log_ratio
    assert shifted.probs == base.probs


def test_two_point_family_divisibility():
    with pytest.raises(DomainError, match="multiple"):
        closure_two_point(7, 1, (0, 0))
    with pytest.raises(DomainError):
        closure_two_point(6, 0, (0, 0))


def test_edge_complete_family():
    half = edge_complete_family(6, (0, 0))
    assert half.probs == {(0, 0): 0.5, (15, 20): 0.5}
    tilted = edge_complete_family(6, (1, -1))
    assert tilted.probs[(15, 20)] == pytest.approx(math.exp(10) / (1 + math.exp(10)), abs=1e-15)


def test_triangle_free_family_concentrates_on_bipartite(support_tables):
    fam = triangle_free_family(support_tables[6], 5)
    assert all(t == 0 for _, t in fam.log_probs)
    assert fam.prob(turan_densities(6, 2)) > 0.999


def test_triangle_free_census(support_tables):
    census = triangle_free_census(5)
    triangle_free = sum(c for (e, t), c in support_tables[5].counts.items() if t == 0)
    assert sum(total for total, _ in census.by_edges.values()) == triangle_free
    assert census.by_edges[6] == (10, 10)  # K_{2,3} only
    assert census.by_edges[5][0] > census.by_edges[5][1]  # the 5-cycles
    assert non_turan_mass(census, 0.0) > 0
    assert non_turan_mass(census, 10.0) < non_turan_mass(census, 0.0)


def test_triangle_free_census_matches_support(support_tables):
    census = triangle_free_census(6)
    table = support_tables[6]
    assert {e: total for e, (total, _) in census.by_edges.items()} == {
        e: c for (e, t), c in table.counts.items() if t == 0
    }


def test_tv_distance():
    assert tv_distance({(0, 0): 1.0}, {(1, 0): 1.0}) == 1.0
    assert tv_distance({(0, 0): 0.5, (1, 0): 0.5}, {(0, 0): 0.5, (1, 0): 0.5}) == 0.0


def test_exposed_faces_at_n6(support_tables):
    table = support_tables[6]
    assert exposed_face(table, o_k(1)) == [turan_counts(6, 2), turan_counts(6, 3)]
    assert exposed_face(table, o_minus_one_n(6)) == [(0, 0), (15, 20)]
    # (1, -1/2) is a facet normal of P_6: four Turan points tie
    assert len(exposed_face(table, Direction(1, Fraction(-1, 2)))) == 4
    assert expected_face(6, Direction(1, Fraction(-1, 2))) == [turan_counts(6, 4)]


def test_face_family_on_critical_facet(support_tables):
    fam = face_family(support_tables[6], o_k(1), (0, 0))
    assert fam.distribution() == pytest.approx({(9, 0): 0.4, (12, 8): 0.6})


def test_closure_convergence(support_tables):
    check = closure_convergence_check(support_tables[6], 1, (1, 1))
    assert check.limit_kind == "two_point"
    assert check.matches_expected
    assert check.strictly_decreasing
    assert check.tv[-1] < 1e-6
    assert check.statistic_counts == check.turan_counts


def test_closure_limit_agrees_with_two_point_family(support_tables):
    check = closure_convergence_check(support_tables[6], 1, (1, 1))
    fam = closure_two_point(6, 1, (1, 1))
    assert check.limit == pytest.approx(fam.distribution())


def test_generic_direction_at_n6_reaches_a_face(support_tables):
    check = closure_convergence_check(support_tables[6], 3, (0, 0), o=Direction(1, Fraction(-1, 2)))
    assert check.limit_kind == "face"
    assert not check.matches_expected


@pytest.mark.slow
def test_generic_direction_point_mass_at_n7():
    table = enumerate_support(7)
    o = Direction(1, Fraction(-1, 2))
    check = closure_convergence_check(table, 3, (0, 0), o=o, r_schedule=(50, 100, 200, 400))
    assert check.face == [turan_counts(7, 4)]
    assert check.limit_kind == "point_mass"
    assert check.matches_expected
    assert check.tv[-1] < 1e-9


def test_ratio_trends():
    ns = list(range(6, 61, 6))
    flat = ratio_trend(1, (0, 0), ns)
    assert flat[0].exact_ratio == Fraction(3, 2)
    assert abs(flat[-1].log_ratio - flat[-1].stirling_log_ratio) < 0.05 * abs(flat[-1].log_ratio)
    plus = ratio_trend(1, (10, -6), ns)
    assert all(b.log_ratio > a.log_ratio for a, b in zip(plus, plus[1:]))
    assert plus[-1].log_ratio > 60 ** 2 / 6 * 2 * 0.9
    minus = ratio_trend(1, (20, -80), ns)
    assert minus[-1].log_ratio < -1000
    assert minus[-1].ratio == pytest.approx(0.0)


def test_stirling_constant_value():
    assert stirling_log_constant(1) == pytest.approx(-1.0628, abs=1e-3)


def test_prob_of_point_outside_the_lattice_is_zero(support_tables):
    fam = exact_family(support_tables[6], (0, 0))
    assert fam.prob(point(0, 0)) == pytest.approx(2.0 ** -15)
    # E = 1/2 and T = 1/6 are not counts of any graph on 6 nodes
    assert fam.prob(point(Fraction(1, 36), 0)) == 0.0
    assert fam.prob(point(0, Fraction(1, 216))) == 0.0
    assert fam.prob(turan_densities(6, 3)) == pytest.approx(fam.prob(turan_counts(6, 3)))
