import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftchaos.errors import BetaDepthExceeded, NotPeriodic
from shiftchaos.shiftspace import (PointProgram, beta_expansion_of_one, beta_shift,
                                   coprime_mixing_check, first_disagreement,
                                   full_shift, golden_mean_system, is_admissible,
                                   is_primitive, language, point_metric, sft,
                                   system_from_text, system_to_text)
from shiftchaos.words import RunWord


def test_full_shift_admits_all_words():
    sys2 = full_shift(2)
    assert is_admissible(sys2, "1101")


def test_sft_forbidden_transition():
    m = sft([[0, 1], [1, 0]])
    assert not is_admissible(m, "00")
    assert is_admissible(m, "0101")


def test_beta_lexicographic_rejection():
    # oracle: apply sigma^k(w) <= 110110... by hand; 111 fails at k = 0
    sys_b = beta_shift(parry_word="110110")
    assert not is_admissible(sys_b, "111")
    assert is_admissible(sys_b, "110")
    assert is_admissible(sys_b, "1011")
    with pytest.raises(BetaDepthExceeded):
        is_admissible(sys_b, "1101101")


def test_beta_expansion_golden_ratio_like():
    # beta = 3/2: greedy digits of 1 computed independently by the recursion
    digits = beta_expansion_of_one(Fraction(3, 2), 8)
    x = Fraction(1)
    want = []
    for _ in range(8):
        d = int(Fraction(3, 2) * x)
        x = Fraction(3, 2) * x - d
        want.append(d)
    assert list(digits) == want


def test_beta_integer_is_full_shift_test_sequence():
    sys_b = beta_shift(beta=2, depth=6)
    assert sys_b.parry_word == (1,) * 6
    for w in itertools.product((0, 1), repeat=4):
        assert is_admissible(sys_b, w)


def test_language_sizes():
    assert len(language(full_shift(2), 3)) == 8
    # golden mean: enumerate all 16 words of length 4 and strike those with 11
    words = [w for w in itertools.product((0, 1), repeat=4)
             if (1, 1) not in zip(w, w[1:])]
    assert language(golden_mean_system(), 4) == sorted(words)
    assert len(words) == 8


def test_language_equals_path_enumeration_for_sfts():
    system = sft([[1, 1, 0], [0, 0, 1], [1, 0, 1]])
    for n in range(1, 7):
        paths = [(s,) for s in range(3)]
        for _ in range(n - 1):
            paths = [p + (t,) for p in paths for t in range(3)
                     if system.transition[p[-1]][t]]
        assert language(system, n) == sorted(set(paths))


def test_point_metric_values():
    sys2 = full_shift(2)
    x = PointProgram.periodic(sys2, (0,))
    y = PointProgram.eventually_periodic(sys2, (1,), (0,))
    d, exact = point_metric(x, y, 50)
    assert exact and d == Fraction(1, 2)
    d, exact = point_metric(x, x, 50)
    assert exact and d == 0
    # (01)^inf vs (01)^100 . (10)^inf -> first disagreement at coordinate 201
    a = PointProgram.periodic(sys2, (0, 1))
    b = PointProgram.eventually_periodic(sys2, (0, 1) * 100, (1, 0))
    d, exact = point_metric(a, b, 300)
    assert exact and d == Fraction(1, 2 ** 201)


def test_point_metric_bound_flag():
    sys2 = full_shift(2)
    a = PointProgram.periodic(sys2, (0, 1))
    b = PointProgram.eventually_periodic(sys2, (0, 1) * 100, (1, 0))
    d, exact = point_metric(a, b, 10)
    assert not exact and d == Fraction(1, 2 ** 10)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=6).map(tuple),
       st.lists(st.integers(0, 1), min_size=1, max_size=6).map(tuple),
       st.lists(st.integers(0, 1), min_size=1, max_size=6).map(tuple))
def test_metric_is_ultrametric(cx, cy, cz):
    sys2 = full_shift(2)
    x = PointProgram.periodic(sys2, cx)
    y = PointProgram.periodic(sys2, cy)
    z = PointProgram.periodic(sys2, cz)
    depth = 80
    dxz = point_metric(x, z, depth)[0]
    dxy = point_metric(x, y, depth)[0]
    dyz = point_metric(y, z, depth)[0]
    assert dxz <= max(dxy, dyz)


def test_is_primitive_known_matrices():
    # oracle: square [[1,1],[1,0]] by hand; all entries positive at power 2
    assert is_primitive([[1, 1], [1, 0]]) == (True, 2)
    assert is_primitive([[0, 1], [1, 0]]) == (False, None)


def test_primitive_rose_two_three():
    # cycles of lengths 2 and 3 joined end-to-start: primitive, index <= 9
    m = [[0, 1, 0, 0, 0],
         [1, 0, 1, 0, 0],
         [0, 0, 0, 1, 0],
         [0, 0, 0, 0, 1],
         [1, 0, 1, 0, 0]]
    ok, idx = is_primitive(m)
    assert ok and idx <= 9
    # primitivity implies paths of every length >= index between all pairs
    import numpy as np
    p = np.eye(5, dtype=bool)
    mat = np.array(m, dtype=bool)
    for l in range(1, idx + 6):
        p = p @ mat
        if l >= idx:
            assert p.all()


def test_coprime_mixing_check():
    sys2 = full_shift(2)
    assert coprime_mixing_check(sys2, (0, 1), (0, 0, 1))
    assert not coprime_mixing_check(sys2, (0, 1), (0, 0, 1, 1))
    # periods 1 and 2: a fixed point plus a 2-cycle
    assert coprime_mixing_check(sys2, (0,), (0, 1))
    gm = golden_mean_system()
    with pytest.raises(NotPeriodic):
        coprime_mixing_check(gm, (1, 1), (0,))


def test_beta_admissibility_is_hereditary():
    sys_b = beta_shift(beta=Fraction(8, 5), depth=10)
    for w in language(sys_b, 6):
        for i in range(len(w)):
            for j in range(i + 1, len(w) + 1):
                assert is_admissible(sys_b, w[i:j])


def test_system_text_roundtrip():
    for system in (full_shift(3), golden_mean_system(),
                   beta_shift(beta=Fraction(5, 3), depth=12)):
        again = system_from_text(system_to_text(system))
        assert again == system


def test_point_program_huge_coordinates():
    sys2 = full_shift(2)
    head = RunWord([((0, 1), 10 ** 15)])
    x = PointProgram(sys2, head, (1, 1, 0))
    assert x.coordinate(2 * 10 ** 15 + 1) == 1
    assert x.coordinate(2 * 10 ** 15 + 2) == 0
    assert list(x.prefix_array(6)) == [0, 1, 0, 1, 0, 1]
