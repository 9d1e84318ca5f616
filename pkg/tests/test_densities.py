from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftchaos.densities import (IndexSet, classify_case, densities,
                                  dyadic_block_set, statistical_omega,
                                  visiting_times)
from shiftchaos.shiftspace import PointProgram, full_shift
from shiftchaos.words import RunWord

SYS2 = full_shift(2)


def test_exact_periodic_tail_densities():
    s = IndexSet(100, tuple(range(0, 100, 2)), ("periodic", 0, 2, (0,)))
    rep = densities(s)
    assert rep.exact
    assert rep.as_tuple() == (Fraction(1, 2),) * 4


def test_empty_set_densities():
    s = IndexSet(64, ())
    rep = densities(s)
    assert rep.as_tuple() == (0, 0, 0, 0)


def test_dyadic_block_example():
    # oracle: evaluate the four limits along block boundaries by brute force
    # at large k; frozen values 1/3, 2/3, 0, 1
    s = dyadic_block_set(4 ** 9)
    rep = densities(s)
    assert rep.exact
    assert rep.as_tuple() == (Fraction(1, 3), Fraction(2, 3), Fraction(0), Fraction(1))
    # independent check of the frozen prefix limits at boundaries
    members = np.array(s.members)
    for k in (6, 7, 8):
        n_lo = 4 ** k
        n_hi = 2 * 4 ** k
        lo = Fraction(int((members < n_lo).sum()), n_lo)
        hi = Fraction(int((members < n_hi).sum()), n_hi)
        assert abs(lo - Fraction(1, 3)) < Fraction(1, 4 ** (k - 1))
        assert abs(hi - Fraction(2, 3)) < Fraction(1, 4 ** (k - 1))


def test_estimator_chain_order():
    rng = np.random.default_rng(7)
    for _ in range(50):
        horizon = int(rng.integers(50, 400))
        members = tuple(int(v) for v in
                        np.nonzero(rng.random(horizon) < rng.random())[0])
        rep = densities(IndexSet(horizon, members))
        assert rep.banach_lower <= rep.lower <= rep.upper <= rep.banach_upper
        assert not rep.exact


def test_complement_prefix_identity_with_tails():
    # lower(S) + upper(complement) = 1 for exact periodic tails
    s = IndexSet(60, tuple(range(0, 60, 3)), ("periodic", 0, 3, (0,)))
    comp = IndexSet(60, tuple(i for i in range(60) if i % 3), ("periodic", 0, 3, (1, 2)))
    assert densities(s).lower + densities(comp).upper == 1


def test_visiting_times_examples():
    x = PointProgram.periodic(SYS2, (0, 1))
    s = visiting_times(x, (0,), 50)
    assert s.members == tuple(range(0, 50, 2))
    y = PointProgram.periodic(SYS2, (0,))
    assert visiting_times(y, (1,), 40).members == ()


def test_visiting_times_word_start_convention():
    x = PointProgram.eventually_periodic(SYS2, (0, 0, 1, 1), (0, 1))
    s = visiting_times(x, (1, 1), 10)
    assert 2 in s.members and len(s.members) == 1


def test_statistical_omega_fixed_point():
    x = PointProgram.periodic(SYS2, (0,))
    est = statistical_omega(x, 512, 3, Fraction(1, 12))
    full = frozenset({(0, 0, 0)})
    for kind in est.supports:
        assert est.supports[kind] == full
    assert est.omega_full == full


def test_statistical_omega_periodic_orbit():
    x = PointProgram.periodic(SYS2, (0, 1))
    est = statistical_omega(x, 512, 1, Fraction(1, 4))
    both = frozenset({(0,), (1,)})
    for kind in est.supports:
        assert est.supports[kind] == both
    assert est.omega_full == both


def test_statistical_omega_nesting_invariant():
    head = RunWord([((0,), 37), ((0, 1), 40), ((1,), 64), ((0, 1, 1), 30)])
    x = PointProgram(SYS2, head, (0, 1, 1))
    est = statistical_omega(x, 250, 2, Fraction(1, 16))
    assert est.supports["banach_lower"] <= est.supports["lower"]
    assert est.supports["lower"] <= est.supports["upper"]
    assert est.supports["upper"] <= est.supports["banach_upper"]
    assert est.supports["banach_upper"] <= est.omega_full


def _estimate(supports, full):
    from shiftchaos.densities import OmegaEstimate
    sup = {"banach_lower": frozenset(supports[0]), "lower": frozenset(supports[1]),
           "upper": frozenset(supports[2]), "banach_upper": frozenset(supports[3])}
    return OmegaEstimate(1, sup, frozenset(full))


def test_classifier_patterns():
    a, b, c, d = (0,), (1,), (0, 0), (1, 1)  # word stand-ins
    # case 1: empty B_* < dlo = dup < B* = full
    assert classify_case(_estimate([[], [a], [a], [a, b]], [a, b])) == "1"
    assert classify_case(_estimate([[], [a], [a], [a, b]], [a, b, c])) == "1'"
    assert classify_case(_estimate([[], [], [a], [a]], [a])) == "2"
    assert classify_case(_estimate([[], [], [a], [a]], [a, b])) == "2'"
    assert classify_case(_estimate([[], [a], [a, b], [a, b]], [a, b])) == "3"
    assert classify_case(_estimate([[], [a], [a, b], [a, b]], [a, b, c])) == "3'"
    assert classify_case(_estimate([[], [], [a], [a, b]], [a, b])) == "4"
    assert classify_case(_estimate([[], [], [a], [a, b]], [a, b, c])) == "4'"
    assert classify_case(_estimate([[], [a], [a, b], [a, b, c]], [a, b, c])) == "5"
    assert classify_case(_estimate([[], [a], [a, b], [a, b, c]], [a, b, c, d])) == "5'"
    assert classify_case(_estimate([[], [a], [a], [a]], [a])) == "6"
    assert classify_case(_estimate([[], [a], [a], [a]], [a, b])) == "6'"
    # nonempty syndetic center: outside the twelve cases
    assert classify_case(_estimate([[a], [a], [a], [a]], [a])) == "other"
    # degenerate empty upper pattern
    assert classify_case(_estimate([[], [], [], []], [a])) == "other"


def test_scan_depth_projection_separates_shared_shallow_words():
    # two long alternating regimes sharing the depth-1 word (0,) and (1,):
    # at scan depth 4 each deep word dies in the other regime, so the lower
    # and Banach-lower supports project to nothing
    head = RunWord([((0, 1), 300), ((0, 0, 1), 400),
                    ((0, 1), 3000), ((0, 0, 1), 20000)])
    x = PointProgram(SYS2, head, (0, 0, 1))
    est = statistical_omega(x, len(head), 1, Fraction(1, 8), scan_depth=4,
                            window_floor=32, prefix_floor=64)
    assert est.supports["lower"] == frozenset()
    assert est.supports["banach_lower"] == frozenset()
    assert est.supports["upper"] == frozenset({(0,), (1,)})
    naive = statistical_omega(x, len(head), 1, Fraction(1, 8))
    assert naive.supports["lower"] == frozenset({(0,), (1,)})
