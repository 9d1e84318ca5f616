from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftchaos.errors import AnchorNotOnPolyline, BadWeights, NotPeriodic
from shiftchaos.measures import (Measure, MeasurePolyline, Observable,
                                 convex_combine, empirical_measure, indicator,
                                 integrate, measure_from_text, measure_to_text,
                                 periodic_measure, weakstar_distance)
from shiftchaos.shiftspace import PointProgram, full_shift, golden_mean_system

SYS2 = full_shift(2)


def test_periodic_measure_cylinder_weights():
    mu = periodic_measure(SYS2, (0, 1))
    assert mu.cylinder((0,)) == Fraction(1, 2)
    # cycle 001, cylinder [00] at depth 2: cyclic occurrences of 00 in 001
    nu = periodic_measure(SYS2, (0, 0, 1))
    assert nu.cylinder((0, 0)) == Fraction(1, 3)
    # fixed point: Dirac
    dirac = periodic_measure(SYS2, (0,))
    for m in range(1, 6):
        assert dirac.cylinder((0,) * m) == 1


def test_periodic_measure_rejects_inadmissible_cycle():
    with pytest.raises(NotPeriodic):
        periodic_measure(golden_mean_system(), (1, 1))
    with pytest.raises(NotPeriodic):
        # word admissible but repetition is not: 10 + 10 has no 11, so use 1
        periodic_measure(golden_mean_system(), (1,))


def test_cylinder_table_sums_to_one():
    mu = periodic_measure(SYS2, (0, 0, 1, 1, 0))
    for depth in range(1, 5):
        assert sum(mu.table(depth).values()) == 1


def test_empirical_measure_examples():
    x = PointProgram.periodic(SYS2, (0, 1))
    assert empirical_measure(x, 2, 1) == {(0,): Fraction(1, 2), (1,): Fraction(1, 2)}
    assert empirical_measure(x, 3, 1) == {(0,): Fraction(2, 3), (1,): Fraction(1, 3)}
    y = PointProgram.eventually_periodic(SYS2, (0,) * 10, (1,))
    assert empirical_measure(y, 20, 1) == {(0,): Fraction(1, 2), (1,): Fraction(1, 2)}


def test_empirical_equals_periodic_at_full_period():
    cyc = (0, 1, 1, 0, 1)
    x = PointProgram.periodic(SYS2, cyc)
    mu = periodic_measure(SYS2, cyc)
    for depth in (1, 2, 3):
        assert empirical_measure(x, len(cyc), depth) == mu.table(depth)


def test_weakstar_distance_examples():
    mu = periodic_measure(SYS2, (0,))
    nu = periodic_measure(SYS2, (1,))
    # cylinders [0], [1] disagree by 1 each: 2^-1 + 2^-2 = 3/4
    value, err = weakstar_distance(mu, nu, truncation=2)
    assert value == Fraction(3, 4)
    assert err == Fraction(1, 4)
    value, err = weakstar_distance(mu, mu, truncation=12)
    assert value == 0 and err == Fraction(1, 2 ** 12)


def test_weakstar_depth_one_blind_spot():
    mu = periodic_measure(SYS2, (0, 1))
    nu = convex_combine([(Fraction(1, 2), periodic_measure(SYS2, (0,))),
                         (Fraction(1, 2), periodic_measure(SYS2, (1,)))])
    # depth-1 cylinders agree exactly; differences appear from depth 2
    value, _ = weakstar_distance(mu, nu, truncation=2)
    assert value == 0
    value, _ = weakstar_distance(mu, nu, truncation=6)
    assert value > 0


def test_weakstar_metric_axioms_on_truncation():
    mus = [periodic_measure(SYS2, c) for c in ((0, 1), (0, 0, 1), (1,))]
    for a in mus:
        for b in mus:
            dab, _ = weakstar_distance(a, b, truncation=8)
            dba, _ = weakstar_distance(b, a, truncation=8)
            assert dab == dba
            for c in mus:
                dac, _ = weakstar_distance(a, c, truncation=8)
                dcb, _ = weakstar_distance(c, b, truncation=8)
                assert dab <= dac + dcb


def test_convex_combine_rules():
    mu = periodic_measure(SYS2, (0, 1))
    assert convex_combine([(1, mu)]) == mu
    with pytest.raises(BadWeights):
        convex_combine([(Fraction(1, 2), mu)])
    with pytest.raises(BadWeights):
        convex_combine([(Fraction(3, 2), mu), (Fraction(-1, 2), mu)])
    half = convex_combine([(Fraction(1, 2), periodic_measure(SYS2, (0,))),
                           (Fraction(1, 2), periodic_measure(SYS2, (1,)))])
    assert half.cylinder((0,)) == Fraction(1, 2)


def test_integrate_examples():
    phi_const = Observable(1, {(0,): Fraction(7, 3), (1,): Fraction(7, 3)})
    mu = periodic_measure(SYS2, (0, 1, 1))
    assert integrate(mu, phi_const) == Fraction(7, 3)
    assert integrate(mu, indicator(SYS2, (1,))) == Fraction(2, 3)
    assert integrate(periodic_measure(SYS2, (0, 1)), indicator(SYS2, (1,))) == Fraction(1, 2)


def test_integral_linearity_under_combination():
    phi = indicator(SYS2, (1,))
    mu1 = periodic_measure(SYS2, (0, 1))     # integral 1/2
    mu2 = periodic_measure(SYS2, (1,))       # integral 1
    theta = Fraction(3, 4)
    mix = convex_combine([(theta, mu1), (1 - theta, mu2)])
    assert integrate(mix, phi) == theta * integrate(mu1, phi) + (1 - theta) * integrate(mu2, phi)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=5).map(tuple),
       st.lists(st.integers(0, 1), min_size=1, max_size=5).map(tuple),
       st.integers(1, 15))
def test_combine_integrate_identity(c1, c2, num):
    theta = Fraction(num, 16)
    mu1 = periodic_measure(SYS2, c1)
    mu2 = periodic_measure(SYS2, c2)
    phi = indicator(SYS2, (1, 0))
    mix = convex_combine([(theta, mu1), (1 - theta, mu2)])
    assert integrate(mix, phi) == theta * integrate(mu1, phi) + (1 - theta) * integrate(mu2, phi)


def test_measure_serialization_roundtrip():
    mu = convex_combine([(Fraction(2, 3), periodic_measure(SYS2, (0, 1))),
                         (Fraction(1, 3), periodic_measure(SYS2, (0, 0, 1)))])
    text = measure_to_text(mu)
    again = measure_from_text(SYS2, text)
    assert again == mu


def test_observable_serialization_roundtrip():
    phi = Observable(2, {(0, 0): Fraction(1, 4), (0, 1): 0, (1, 0): 0, (1, 1): 2})
    again = Observable.from_text(phi.to_text())
    assert again == phi
    phi.check_total(SYS2)


def test_polyline_singleton():
    mu = periodic_measure(SYS2, (0, 1))
    line = MeasurePolyline([mu], Fraction(1, 4), mu)
    alphas, marks = line.emit(7)
    assert all(a == mu for a in alphas)
    assert marks == [1, 3, 5, 7]


def test_polyline_two_anchor_structure():
    mu = periodic_measure(SYS2, (0, 1))
    nu = periodic_measure(SYS2, (0, 0, 1))
    line = MeasurePolyline([mu, nu], Fraction(1, 2), mu)
    alphas, marks = line.emit(12)
    # doubled split anchor at each mark, gaps at least 2
    for m in marks:
        assert alphas[m - 1] == mu and alphas[m] == mu
    assert all(b - a >= 2 for a, b in zip(marks, marks[1:]))
    # consecutive distances shrink sweep over sweep at the mesh rate
    dists = [weakstar_distance(a, b, truncation=10)[0]
             for a, b in zip(alphas, alphas[1:])]
    assert max(dists[6:]) <= max(dists[:6])


def test_polyline_anchor_must_be_vertex():
    mu = periodic_measure(SYS2, (0, 1))
    nu = periodic_measure(SYS2, (0, 0, 1))
    other = periodic_measure(SYS2, (1,))
    with pytest.raises(AnchorNotOnPolyline):
        MeasurePolyline([mu, nu], Fraction(1, 2), other)


def test_polyline_density_on_parameter_grid():
    # every grid mixture is eventually within 1/8 of some emitted alpha
    mu = periodic_measure(SYS2, (0, 1))
    nu = periodic_measure(SYS2, (0, 0, 1))
    line = MeasurePolyline([mu, nu], Fraction(1, 2), mu)
    alphas, _ = line.emit(40)
    for j in range(9):
        target = convex_combine([(Fraction(j, 8), nu), (1 - Fraction(j, 8), mu)])
        best = min(weakstar_distance(target, a, truncation=10)[0] for a in alphas)
        assert best <= Fraction(1, 8)
