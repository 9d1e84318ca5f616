"""Ambient symbolic spaces: full shifts, SFTs, beta-shifts, and point programs.

The metric on a system with alphabet size n is n**(-k) where k is the first
disagreeing coordinate (1-based); each system uses its own alphabet size as
the base and metrics are never compared across systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BetaDepthExceeded, NotPeriodic
from .words import RunWord, as_word, concat, parse_word, word_str


@dataclass(frozen=True)
class ShiftSystem:
    """Full shift, SFT by 0/1 transition matrix, or beta-shift by Parry word."""

    alphabet_size: int
    kind: str  # "full" | "sft" | "beta"
    transition: tuple | None = None
    parry_word: tuple | None = None
    beta: Fraction | None = None

    def __post_init__(self):
        if self.alphabet_size < 2:
            raise ValueError("alphabet must have at least 2 symbols")
        if self.kind not in ("full", "sft", "beta"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "sft":
            m = self.transition
            if m is None or any(len(row) != len(m) for row in m) or len(m) != self.alphabet_size:
                raise ValueError("sft needs a square transition matrix over the alphabet")
            for i, row in enumerate(m):
                if not any(row):
                    raise ValueError(f"dead row {i} in transition matrix")
            for j in range(len(m)):
                if not any(row[j] for row in m):
                    raise ValueError(f"dead column {j} in transition matrix")
        if self.kind == "beta":
            p = self.parry_word
            if not p:
                raise ValueError("beta system needs a parry word")
            if any(s >= self.alphabet_size for s in p):
                raise ValueError("parry word leaves the alphabet")
            # the expansion of 1 must pass its own lexicographic test
            for k in range(1, len(p)):
                if _lex_compare(p[k:], p) > 0:
                    raise ValueError("parry word fails its own admissibility test")

    @property
    def metric_base(self):
        return self.alphabet_size


def full_shift(alphabet_size):
    return ShiftSystem(alphabet_size, "full")


def sft(matrix):
    matrix = tuple(tuple(int(bool(v)) for v in row) for row in matrix)
    return ShiftSystem(len(matrix), "sft", transition=matrix)


def golden_mean_system():
    """Binary SFT forbidding the word 11."""
    return sft([[1, 1], [1, 0]])


def beta_expansion_of_one(beta, depth):
    """Greedy expansion of 1 in base beta (exact rational arithmetic).

    For integer beta the test sequence is (beta-1)^inf; if the greedy
    expansion terminates, the quasi-greedy periodic form is substituted so
    the stored word is the correct lexicographic test for the closure.
    """
    beta = Fraction(beta)
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    if beta.denominator == 1:
        return (int(beta) - 1,) * depth
    digits = []
    x = Fraction(1)
    for _ in range(depth):
        d = math.floor(beta * x)
        x = beta * x - d
        digits.append(d)
        if x == 0:
            # quasi-greedy: (d1 ... d_{m-1} (d_m - 1)) repeated
            digits[-1] -= 1
            cycle = tuple(digits)
            reps = -(-depth // len(cycle))
            return (cycle * reps)[:depth]
    return tuple(digits)


def beta_shift(beta=None, depth=24, parry_word=None):
    """Beta-shift from an exact rational beta (preset) or an explicit Parry word."""
    if parry_word is not None:
        p = as_word(parry_word)
        b = max(p)
        return ShiftSystem(b + 1, "beta", parry_word=p,
                           beta=Fraction(beta) if beta is not None else None)
    beta = Fraction(beta)
    p = beta_expansion_of_one(beta, depth)
    if beta.denominator == 1:
        b = int(beta) - 1
    else:
        b = math.floor(beta)
    return ShiftSystem(b + 1, "beta", parry_word=p, beta=beta)


def _lex_compare(w, ref):
    """-1 / 0 / +1 comparing w against ref on the overlap, 0 if w runs out equal."""
    for a, b in zip(w, ref):
        if a < b:
            return -1
        if a > b:
            return 1
    return 0


def is_admissible(system, w):
    """True iff the finite word extends to a point of the system."""
    w = as_word(w)
    if not w:
        raise ValueError("word must be nonempty")
    if any(not 0 <= s < system.alphabet_size for s in w):
        raise ValueError("symbol outside the alphabet")
    if system.kind == "full":
        return True
    if system.kind == "sft":
        t = system.transition
        return all(t[a][b] for a, b in zip(w, w[1:]))
    # beta: Parry's lexicographic criterion against the expansion of 1
    p = system.parry_word
    if len(w) > len(p):
        raise BetaDepthExceeded(
            f"word of length {len(w)} exceeds stored expansion ({len(p)} digits)")
    return all(_lex_compare(w[k:], p) <= 0 for k in range(len(w)))


def language(system, n):
    """All admissible words of length n, in lexicographic order."""
    if n < 1:
        raise ValueError("n must be positive")
    if system.kind == "beta" and n > len(system.parry_word):
        raise BetaDepthExceeded(
            f"language depth {n} exceeds stored expansion ({len(system.parry_word)} digits)")
    if system.kind == "full":
        out = [()]
        for _ in range(n):
            out = [w + (s,) for w in out for s in range(system.alphabet_size)]
        return out
    if system.kind == "sft":
        t = system.transition
        out = [(s,) for s in range(system.alphabet_size)]
        for _ in range(n - 1):
            out = [w + (s,) for w in out for s in range(system.alphabet_size) if t[w[-1]][s]]
        return out
    # beta: admissibility is hereditary, so grow prefixes
    out = [(s,) for s in range(system.alphabet_size) if is_admissible(system, (s,))]
    for _ in range(n - 1):
        out = [w + (s,) for w in out for s in range(system.alphabet_size)
               if is_admissible(system, w + (s,))]
    return out


def is_primitive(matrix):
    """(True, least l with M^l > 0) searched up to the Wielandt bound, else (False, None)."""
    m = np.array(matrix, dtype=bool)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    size = m.shape[0]
    bound = size * size - 2 * size + 2 if size > 1 else 1
    power = np.eye(size, dtype=bool)
    for l in range(1, bound + 1):
        power = power @ m
        if power.all():
            return True, l
    return False, None


def primitive_period(w):
    w = as_word(w)
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w == w[:d] * (n // d):
            return d
    return n


def check_cycle(system, cycle):
    """Raise NotPeriodic unless cycle's infinite repetition is admissible."""
    cycle = as_word(cycle)
    if system.kind == "beta":
        # need to test shifts against the stored expansion up to its depth
        reps = -(-(len(system.parry_word) + len(cycle)) // len(cycle))
        if not is_admissible(system, (cycle * reps)[:len(system.parry_word)]):
            raise NotPeriodic(f"cycle {word_str(cycle)} repetition is inadmissible")
        return cycle
    if not is_admissible(system, cycle + cycle):
        raise NotPeriodic(f"cycle {word_str(cycle)} repetition is inadmissible")
    return cycle


def coprime_mixing_check(system, p1, p2):
    """Coprime periodic orbits in a transitive shadowing system certify mixing."""
    p1 = check_cycle(system, p1)
    p2 = check_cycle(system, p2)
    return math.gcd(primitive_period(p1), primitive_period(p2)) == 1


class PointProgram:
    """A finitely described point: explicit head, then a repeating tail cycle.

    Coordinates are computed on demand by run arithmetic, so positions may be
    arbitrarily large integers.  The generator is deterministic: the same
    index always yields the same symbol.
    """

    def __init__(self, system, head, tail_cycle, meta=None):
        self.system = system
        self.head = head if isinstance(head, RunWord) else RunWord.from_word(as_word(head or ()))
        tail = tail_cycle if isinstance(tail_cycle, RunWord) else RunWord.from_word(as_word(tail_cycle))
        if len(tail) == 0:
            raise ValueError("tail cycle must be nonempty")
        self.tail = tail
        self.meta = dict(meta or {})

    @classmethod
    def periodic(cls, system, cycle):
        cycle = check_cycle(system, cycle)
        return cls(system, (), cycle, meta={"kind": "periodic"})

    @classmethod
    def eventually_periodic(cls, system, prefix, cycle):
        return cls(system, as_word(prefix), as_word(cycle), meta={"kind": "eventually-periodic"})

    def coordinate(self, i):
        if i < 0:
            raise IndexError(i)
        h = len(self.head)
        if i < h:
            return self.head.symbol(i)
        return self.tail.symbol((i - h) % len(self.tail))

    def prefix_runword(self, n):
        """First n symbols as a RunWord (exact, no materialization)."""
        h = len(self.head)
        if n <= h:
            return _truncate_runword(self.head, n)
        rest = n - h
        reps, extra = divmod(rest, len(self.tail))
        parts = list(self.head.runs)
        if reps:
            parts.append((self.tail, reps))
        if extra:
            parts.append((_truncate_runword(self.tail, extra), 1))
        return RunWord(parts)

    def prefix_array(self, n):
        return self.prefix_runword(n).to_array(n)

    def prefix_word(self, n):
        return tuple(int(s) for s in self.prefix_array(n))

    def window_counts_prefix(self, horizon, depth):
        """Exact counts of word-starts i < horizon (windows read past the horizon)."""
        return self.prefix_runword(horizon + depth - 1).window_counts(depth, cyclic=False)

    def __repr__(self):
        return f"PointProgram(head={len(self.head)}, tail={len(self.tail)})"


def _truncate_runword(rw, n):
    if isinstance(rw, tuple):
        rw = RunWord.from_word(rw)
    parts = []
    got = 0
    for block, count in rw.runs:
        if got >= n:
            break
        room = n - got
        full = min(count, room // len(block))
        if full:
            parts.append((block, full))
            got += full * len(block)
        if got < n and full < count:
            parts.append((block[: n - got], 1))
            got = n
    return RunWord(parts)


def same_sequence(x, y, cap=10**6):
    """Decide whether two programs generate the same point.

    Returns True / False, or None when deciding would need comparing more
    than ``cap`` coordinates (possible for giant plan-built programs).
    """
    if x is y:
        return True
    bound = max(len(x.head), len(y.head)) + _lcm_capped(len(x.tail), len(y.tail), cap)
    if bound is None or bound > cap:
        return None
    a = x.prefix_array(bound)
    b = y.prefix_array(bound)
    return bool(np.array_equal(a, b))


def _lcm_capped(a, b, cap):
    l = a // math.gcd(a, b) * b
    return l if l <= cap else None


def first_disagreement(x, y, depth):
    """Least 0-based index < depth where the points differ, else None."""
    chunk = 1 << 16
    i = 0
    while i < depth:
        n = min(chunk, depth - i)
        ax = np.array([x.coordinate(i + j) for j in range(n)], dtype=np.int64) \
            if n < 64 else x.prefix_array(i + n)[i:]
        ay = np.array([y.coordinate(i + j) for j in range(n)], dtype=np.int64) \
            if n < 64 else y.prefix_array(i + n)[i:]
        diff = np.nonzero(ax != ay)[0]
        if diff.size:
            return i + int(diff[0])
        i += n
    return None


def point_metric(x, y, depth):
    """Distance n**(-k) with k the first disagreeing coordinate (1-based).

    Returns (value, exact); when no disagreement is found within ``depth``
    the value n**(-depth) is an upper bound and exact is False, except when
    the two programs provably generate the same point (then exactly 0).
    """
    if x.system.alphabet_size != y.system.alphabet_size:
        raise ValueError("points live in systems with different alphabets")
    n = x.system.metric_base
    j = first_disagreement(x, y, depth)
    if j is not None:
        return Fraction(1, n ** (j + 1)), True
    if same_sequence(x, y) is True:
        return Fraction(0), True
    return Fraction(1, n ** depth), False


# system description file (line oriented, see README for the grammar)

def system_to_text(system):
    lines = ["# shiftchaos system v1", f"kind {system.kind}", f"alphabet {system.alphabet_size}"]
    if system.kind == "sft":
        for row in system.transition:
            lines.append("matrix " + "".join(str(v) for v in row))
    if system.kind == "beta":
        lines.append("parry " + word_str(system.parry_word))
        if system.beta is not None:
            lines.append(f"beta {system.beta.numerator}/{system.beta.denominator}")
    return "\n".join(lines) + "\n"


def system_from_text(text):
    kind = None
    alphabet = None
    rows = []
    parry = None
    beta = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition(" ")
        if key == "kind":
            kind = val.strip()
        elif key == "alphabet":
            alphabet = int(val)
        elif key == "matrix":
            rows.append(tuple(int(ch) for ch in val.strip()))
        elif key == "parry":
            parry = parse_word(val)
        elif key == "beta":
            num, _, den = val.partition("/")
            beta = Fraction(int(num), int(den or 1))
    if kind == "full":
        return full_shift(alphabet)
    if kind == "sft":
        return sft(rows)
    if kind == "beta":
        return ShiftSystem(alphabet, "beta", parry_word=parry, beta=beta)
    raise ValueError("unrecognized system description")
