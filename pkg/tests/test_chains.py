from fractions import Fraction

import pytest

from shiftchaos.chains import (Subsystem, ambient_subsystem, block_lengths_available,
                               bridge, certify_icm, distal_pair_block,
                               elementary_subsystem, embed_theta,
                               pair_close_bound, periodic_approximant,
                               rose_grid_check, rose_subsystem, shift_separation,
                               single_cycle_subsystem, zeta_of)
from shiftchaos.densities import densities, visiting_times
from shiftchaos.errors import BudgetTooSmall, NoPath, NotDistal
from shiftchaos.measures import (Measure, convex_combine, periodic_measure,
                                 weakstar_distance)
from shiftchaos.shiftspace import full_shift, golden_mean_system, is_primitive, sft

SYS2 = full_shift(2)


def test_bridge_full_shift():
    w = bridge(SYS2, (1, 0), (0, 1), 1)
    assert len(w) == 1


def test_bridge_golden_mean():
    gm = golden_mean_system()
    # a ends in 1 and b starts with 1: only 101 avoids 11
    assert bridge(gm, (0, 1), (1, 0), 1) == (0,)
    # period-2 system has no odd-length return word: l = 2 means 3 edges
    with pytest.raises(NoPath):
        bridge(sft([[0, 1], [1, 0]]), (0,), (0,), 2)


def test_bridge_rose_system_all_pairs():
    rose = rose_subsystem(SYS2, [(0, 1), (1, 0, 0)])
    system = sft(rose.matrix)  # vertex shift of the rose
    ok, idx = is_primitive(rose.matrix)
    assert ok
    for a in range(5):
        for b in range(5):
            for l in (idx, idx + 1, idx + 3):
                w = bridge(system, (a,), (b,), l)
                assert len(w) == l


def test_certify_icm():
    two_cycle = rose_subsystem(SYS2, [(0, 1)], junctions=[(0, 0)])
    ok, idx = certify_icm(two_cycle)
    assert not ok and idx is None
    rose = rose_subsystem(SYS2, [(0, 1), (1, 0, 0)])
    ok, idx = certify_icm(rose)
    assert ok and idx <= 9


def test_rose_structure_and_fixed_point_freeness():
    rose = rose_subsystem(SYS2, [(0, 1), (1, 0, 0)])
    assert rose.fixed_point_free
    assert rose.label_word(rose.petals[0]) == (0, 1)
    assert rose.label_word(rose.petals[1]) == (1, 0, 0)
    # language at depth 3: all binary words except 111
    lang3 = set(rose.language(3))
    assert (1, 1, 1) not in lang3
    assert len(lang3) == 7
    # no monochromatic cycle, but the diagonal is zero anyway
    assert all(rose.matrix[i][i] == 0 for i in range(rose.n_vertices))


def test_single_cycle_subsystem_language():
    orbit = single_cycle_subsystem(SYS2, (0, 0, 1))
    assert set(orbit.language(3)) == {(0, 0, 1), (0, 1, 0), (1, 0, 0)}


def test_covering_walk_covers():
    rose = rose_subsystem(SYS2, [(0, 1), (1, 0, 0)])
    for depth in (2, 3, 4):
        walk = rose.covering_walk(depth)
        word = rose.label_word(walk)
        from shiftchaos.words import RunWord
        rw = RunWord([(word, 1)])
        assert set(rose.language(depth)) <= rw.windows(depth, cyclic=True)


def test_shift_separation_examples():
    assert shift_separation(SYS2, (0, 1)) == Fraction(1, 2)
    assert shift_separation(SYS2, (1, 0, 0)) == Fraction(1, 4)
    with pytest.raises(NotDistal):
        shift_separation(SYS2, (1, 1))


def test_approximant_snap_trivial():
    orbit = single_cycle_subsystem(SYS2, (0, 1))
    mu = periodic_measure(SYS2, (0, 1))
    p = periodic_approximant(orbit, mu, Fraction(1, 4), 2)
    assert p.to_tuple() == (0, 1)


def test_approximant_budget_error_reports_budget():
    rose = rose_subsystem(SYS2, [(0, 1), (1, 0, 0)])
    mu = convex_combine([(Fraction(1, 2), periodic_measure(SYS2, (0, 1))),
                         (Fraction(1, 2), periodic_measure(SYS2, (1, 0, 0)))])
    with pytest.raises(BudgetTooSmall) as info:
        periodic_approximant(rose, mu, Fraction(1, 8), 10)
    assert info.value.budget > 10
    # at the reported budget the construction succeeds and self-certifies
    n = info.value.budget
    p = periodic_approximant(rose, mu, Fraction(1, 8), n)
    assert len(p) == n
    mu_p = Measure(SYS2, [(Fraction(1), p)])
    value, err = weakstar_distance(mu_p, mu, truncation=8)
    assert value + err < Fraction(1, 8)


def test_distal_pair_block_posts():
    rose = rose_subsystem(SYS2, [(0, 1), (1, 0, 0)])
    mu1 = periodic_measure(SYS2, (0, 1))
    mu2 = periodic_measure(SYS2, (1, 0, 0))
    zeta = zeta_of(SYS2, [convex_combine([(Fraction(1, 2), mu1), (Fraction(1, 2), mu2)])])
    assert zeta == Fraction(1, 4)
    eps = Fraction(7, 64)
    tau = Fraction(1, 3)
    try:
        distal_pair_block(rose, mu1, mu2, Fraction(1, 2), eps, tau, 100)
    except BudgetTooSmall as e:
        n = e.budget
    p1, p2, z = distal_pair_block(rose, mu1, mu2, Fraction(1, 2), eps, tau, n)
    assert z == zeta
    assert len(p1) == len(p2) == n
    # separation: brute-force count on the materialized pair must respect tau
    t1 = p1.to_tuple()
    t2 = p2.to_tuple()
    close = 0
    for i in range(n):
        k = 0
        while k < 40 and t1[(i + k) % n] == t2[(i + k) % n]:
            k += 1
        if Fraction(1, 2 ** (k + 1)) < zeta - eps:
            close += 1
    assert Fraction(close, n) < tau


def test_distal_pair_same_generator_zeta():
    # mu1 = mu2 = orbit(01), theta = 1: zeta = d((01)^inf, (10)^inf) = 1/2
    orbit = single_cycle_subsystem(SYS2, (0, 1))
    mu = periodic_measure(SYS2, (0, 1))
    p1, p2, z = distal_pair_block(orbit, mu, mu, 1, Fraction(1, 8), Fraction(1, 2), 50)
    assert z == Fraction(1, 2)
    assert p1.to_tuple() == (0, 1) * 25
    assert p2.to_tuple() == (1, 0) * 25


def test_elementary_subsystem_snap():
    mu1 = periodic_measure(SYS2, (0, 1))
    mu2 = periodic_measure(SYS2, (0, 0, 1))
    lam, l1, l2 = elementary_subsystem(mu1, mu2, Fraction(1, 4), SYS2)
    ok, idx = is_primitive(lam.matrix)
    assert ok
    assert lam.fixed_point_free
    assert set(l1.language(2)) == {(0, 1), (1, 0)}
    ok, j = rose_grid_check(lam, mu1, mu2, Fraction(1, 4))
    assert ok
    # every rational mixture realized by cycling copies of both petals
    reach = block_lengths_available(lam, 2 * 3 + 36)
    assert all(reach[k] for k in range(2 * 2, len(reach)))


def test_embed_theta_golden_mean():
    gm_sub = rose_subsystem(SYS2, [(0, 1), (1, 0, 0)])
    theta, witness = embed_theta(gm_sub, SYS2)
    assert theta.theta is not None
    insert = theta.theta.insert
    assert not gm_sub.word_admissible(insert)
    # insert visits along the witness have vanishing upper density
    horizon = min(len(witness.head), 200000)
    s = visiting_times(witness, insert, horizon)
    rep = densities(s, window_floor=64)
    assert rep.upper < Fraction(1, 16)
    assert rep.banach_upper < Fraction(1, 4)
    # theta language strictly contains the base language
    assert set(gm_sub.language(3)) < set(theta.language(3))
