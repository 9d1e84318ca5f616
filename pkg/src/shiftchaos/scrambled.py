"""Block plans: prescribed-statistics point construction and realization.

A plan materializes finitely many blocks of the scrambled-set construction:
a prefix entering the carrier, then for each index i either a single
measure-tracking block or an aligned distal pair, repeated N_i times, with
the repetition counts chosen minimally against the plan inequalities

    n_{i+1} <= tau_i * sum_{j<=i} n_j N_j                    (stretch cap)
    sum_{j<i} n_j N_j <= tau_i * sum_{j<=i} n_j N_j          (domination)

plus, in gauge mode, even N_i and the window inequalities tied to the gauge
function.  Realized points are run-length encoded, so plans whose gauge
forces astronomically long stretches stay exactly queryable.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .chains import (approximant_budget, covering_walk_cached, distal_budget,
                     distal_pair_block, periodic_approximant, zeta_of, _mix)
from .errors import BudgetExceeded, BudgetTooSmall
from .measures import weakstar_distance
from .shiftspace import PointProgram, is_admissible
from .words import RunWord, as_word, word_str


# -- gauge functions ----------------------------------------------------------

def _pow_ge(b, c, e):
    """Decide b**c >= 2**e exactly (b >= 2, c, e nonnegative ints)."""
    if c == 0:
        return e <= 0
    k = b.bit_length() - 1
    if b == 1 << k:
        return c * k >= e
    if c * b.bit_length() <= 20000:
        return b ** c >= 1 << e
    prec = 64
    while prec <= 1 << 16:
        with mpmath.workprec(prec):
            lo = mpmath.fmul(c, mpmath.log(b, 2), rounding="d")
            hi = mpmath.fmul(c, mpmath.log(b, 2), rounding="u")
            # directed bounds on c*log2(b); decisive unless e sits between
            if lo > e:
                return True
            if hi < e:
                return False
        prec *= 2
    raise ArithmeticError("could not decide power comparison")


class AlphaFunction:
    """Nondecreasing gauge on positive integers, diverging and sublinear.

    Values and the comparisons alpha(i) * t > rhs are exact; the square-root
    rule without ceiling is kept symbolic (compared by squaring).
    """

    def __init__(self, name):
        if name not in ("ceil_sqrt", "ceil_n_over_log2", "sqrt"):
            raise ValueError(f"unknown gauge rule {name!r}")
        self.name = name

    def value(self, i):
        if i < 1:
            raise ValueError("gauge domain starts at 1")
        if self.name == "ceil_sqrt":
            return math.isqrt(i - 1) + 1
        if self.name == "ceil_n_over_log2":
            # minimal c with (i+2)**c >= 2**i
            with mpmath.workprec(64):
                guess = int(mpmath.floor(i / mpmath.log(i + 2, 2)))
            c = max(1, guess - 2)
            while not _pow_ge(i + 2, c, i):
                c += 1
            return c
        return None  # symbolic sqrt

    def times_gt(self, i, t, rhs):
        """alpha(i) * t > rhs, exactly."""
        t = Fraction(t)
        rhs = Fraction(rhs)
        if self.name == "sqrt":
            if rhs < 0:
                return True
            return i * t * t > rhs * rhs
        return self.value(i) * t > rhs

    def nondecreasing_on(self, sample):
        vals = [self.value(i) if self.name != "sqrt" else i for i in sample]
        return all(a <= b for a, b in zip(vals, vals[1:]))

    def divergence_witness(self, bound):
        """An index where the gauge exceeds ``bound``."""
        i = 1
        while not self.times_gt(i, 1, bound):
            i *= 2
            if i > 1 << 200:
                raise ArithmeticError("no divergence witness found")
        return i

    def sublinearity_witness(self, r):
        """An index where the gauge falls below r * n (and stays there on a
        sampled verification range)."""
        r = Fraction(r)
        i = 2
        while self.times_gt(i, 1, r * i) or not all(
                not self.times_gt(j, 1, r * j) for j in range(i, 2 * i, max(1, i // 8))):
            i *= 2
            if i > 1 << 200:
                raise ArithmeticError("no sublinearity witness found")
        return i


def alpha_ceil_sqrt():
    return AlphaFunction("ceil_sqrt")


def alpha_ceil_n_over_log2():
    return AlphaFunction("ceil_n_over_log2")


def alpha_sqrt():
    return AlphaFunction("sqrt")


# -- selectors ---------------------------------------------------------------

def bracket(k):
    """The proof's [k]: k minus the largest triangular number below k."""
    if k < 1:
        raise ValueError("bracket domain starts at 1")
    t = 0
    while (t + 1) * (t + 2) // 2 < k:
        t += 1
    return k - t * (t + 1) // 2


@dataclass(frozen=True)
class XiSelector:
    """Bit stream over {1, 2}: explicit prefix, seeded deterministic tail."""

    bits: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if any(b not in (1, 2) for b in self.bits):
            raise ValueError("selector bits must be 1 or 2")

    def bit(self, j):
        """j is 0-based; the proof's xi_h is bit(h-1)."""
        if j < len(self.bits):
            return self.bits[j]
        return random.Random((self.seed, j)).randrange(2) + 1

    def label(self):
        return "".join(str(b) for b in self.bits) + f"@{self.seed}"


# -- plans ---------------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    index: int
    kind: str                 # "single" | "pair"
    n: int
    N: int
    delta: Fraction
    tau: Fraction
    eps: Fraction
    words: tuple              # (RunWord,) or (RunWord, RunWord)
    segments: tuple           # matching label-segment plans

    def word_for(self, choice):
        return self.words[0] if self.kind == "single" else self.words[choice - 1]


@dataclass(frozen=True)
class BlockPlan:
    ambient: object
    carrier: object           # Subsystem whose walks the blocks are
    blocks: tuple
    prefix: tuple             # opening word (enters the carrier after it)
    marks: tuple              # 1-based indices of pair blocks (the set S1)
    split: tuple              # (theta, mu1, mu2)
    zeta: Fraction
    alpha: AlphaFunction | None = None
    c_values: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def m(self):
        return len(self.prefix)

    @property
    def n_blocks(self):
        return len(self.blocks)

    def checkpoint(self, k):
        """M_k = m + sum_{j<=k} n_j N_j."""
        return self.m + sum(b.n * b.N for b in self.blocks[:k])

    def stretch_bounds(self, i):
        return self.checkpoint(i - 1), self.checkpoint(i)

    def final_checkpoint(self):
        return self.checkpoint(self.n_blocks)

    def mark_ordinal(self, i):
        return self.marks.index(i) + 1

    def selection_bit(self, xi, i):
        """Which of the pair words block i uses under selector xi."""
        k = self.mark_ordinal(i)
        return xi.bit(bracket(k) - 1)

    def diam(self):
        return Fraction(1, self.ambient.alphabet_size)

    def geometric_tail(self):
        """Aggregated tail bound for sums of distances over shared stretches."""
        return (self.n_blocks + 2) * Fraction(1, self.ambient.alphabet_size - 1) \
            if self.ambient.alphabet_size > 1 else Fraction(0)

    def window_rhs(self, k):
        """The bound the gauge must clear at window k."""
        return self.checkpoint(k) * self.diam() + self.geometric_tail()

    def validate(self):
        problems = []
        B = self.n_blocks
        taus = [b.tau for b in self.blocks]
        if any(a <= b for a, b in zip(taus, taus[1:])):
            problems.append("tau not strictly decreasing")
        deltas = [b.delta for b in self.blocks]
        if any(a < b for a, b in zip(deltas, deltas[1:])):
            problems.append("delta not nonincreasing")
        eps = [b.eps for b in self.blocks]
        if any(a != 2 * b for a, b in zip(eps, eps[1:])):
            problems.append("eps not halving")
        Ns = [b.N for b in self.blocks]
        if any(a >= b for a, b in zip(Ns, Ns[1:])):
            problems.append("N not strictly increasing")
        for i in range(1, B):
            lhs = self.blocks[i].n
            if lhs > taus[i - 1] * (self.checkpoint(i) - self.m):
                problems.append(f"PS-N-1 fails at i={i}")
        for i in range(1, B + 1):
            before = self.checkpoint(i - 1) - self.m
            upto = self.checkpoint(i) - self.m
            if before > taus[i - 1] * upto:
                problems.append(f"PS-N-2 fails at i={i}")
        gaps = [b - a for a, b in zip(self.marks, self.marks[1:])]
        if any(g < 2 for g in gaps):
            problems.append("mark gaps below 2")
        for i in self.marks:
            if self.blocks[i - 1].kind != "pair":
                problems.append(f"mark {i} is not a pair block")
        if self.alpha is not None:
            if any(b.N % 2 for b in self.blocks):
                problems.append("gauge mode needs even N")
            for k in range(1, B):
                c = self.c_values[k]
                rhs = self.window_rhs(k)
                if not self.alpha.times_gt(self.checkpoint(k) + c, taus[k - 1], rhs):
                    problems.append(f"window gauge fails at k={k}")
                if c > 1 and self.alpha.times_gt(self.checkpoint(k) + c - 1,
                                                 taus[k - 1], rhs):
                    problems.append(f"c_{k} is not minimal")
                nk1 = self.blocks[k].n * self.blocks[k].N
                if not Fraction(nk1 - c) > (1 - taus[k - 1]) * self.checkpoint(k + 1):
                    problems.append(f"PS-N-add fails at k={k}")
        return problems

    def plan_hash(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def to_text(self):
        lines = ["# shiftchaos plan v1"]
        lines.append(f"case {self.meta.get('case_id', '-')}")
        lines.append(f"mode {self.meta.get('mode', '-')}")
        lines.append(f"alpha {self.alpha.name if self.alpha else '-'}")
        lines.append("prefix " + (word_str(self.prefix) if self.prefix else "-"))
        lines.append("marks " + ",".join(str(m) for m in self.marks))
        z = self.zeta
        lines.append(f"zeta {z.numerator}/{z.denominator}")
        for b in self.blocks:
            lines.append(f"block {b.index} {b.kind} n={b.n} N={b.N} "
                         f"delta={b.delta} tau={b.tau} eps={b.eps}")
            for w in b.words:
                runs = ";".join(f"{word_str(blk)}x{cnt}" for blk, cnt in w.runs)
                lines.append("  word " + runs)
        for k in sorted(self.c_values):
            lines.append(f"c {k} {self.c_values[k]}")
        return "\n".join(lines) + "\n"


def plan_words_from_text(text):
    """Recover the per-block word RunWords from a serialized plan."""
    blocks = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("block "):
            blocks.append([])
        elif line.startswith("word "):
            runs = []
            for part in line[5:].split(";"):
                blk, _, cnt = part.rpartition("x")
                from .words import parse_word
                runs.append((parse_word(blk), int(cnt)))
            blocks[-1].append(RunWord(runs))
    return blocks


DEFAULT_TAU = lambda i: Fraction(1, i + 1)


def build_plan(target, lam, split, alpha, horizon_budget, *,
               ambient=None, prefix_word=None, tau=None, delta=None,
               window_floor=0, excursion=None, cover_depth_cap=None,
               seed=0, meta=None):
    """Materialize ``horizon_budget`` blocks of the scrambled construction.

    target: MeasurePolyline (with its marked emission); lam: the carrier
    subsystem (mixing, fixed point free); split: (theta, mu1, mu2) with the
    split measure on the polyline; alpha: gauge for the strengthened mode or
    None.  tau/delta override the schedules (callables of the 1-based index);
    the defaults follow tau_i = 1/(i+1), delta_i = (7 zeta / 8) * 2/(i+1).
    """
    ambient = ambient or lam.ambient
    B = int(horizon_budget)
    if B < 2:
        raise BudgetExceeded("blocks", "need at least two blocks")
    theta, mu1, mu2 = split
    mix = _mix(mu1, mu2, Fraction(theta))
    zeta = zeta_of(ambient, [mix])
    alphas, marks = target.emit(B)
    marks = [m for m in marks if m <= B]
    if not marks:
        raise BudgetExceeded("marks", "no pair block fits the budget")
    tau = tau or DEFAULT_TAU
    taus = [Fraction(tau(i)) for i in range(1, B + 1)]
    if delta is None:
        delta = lambda i: (Fraction(7, 8) * zeta) * Fraction(2, i + 1)
    deltas = [min(Fraction(delta(i)), Fraction(7, 8) * zeta) for i in range(1, B + 1)]
    rho = Fraction(1, ambient.alphabet_size ** len(prefix_word)) if prefix_word \
        else zeta
    eps1 = min(rho / 2, zeta)
    epss = [eps1 / (2 ** i) for i in range(B)]

    # prefix: the opening word (cylinder U), which the construction never
    # revisits when it lies outside the carrier language
    prefix = as_word(prefix_word) if prefix_word else ()
    if prefix and not is_admissible(ambient, prefix):
        raise ValueError("prefix not admissible in the ambient system")

    # covering-tour visibility on the final block
    def tour_reps_for(i, eps_i):
        if window_floor <= 0 or i < B:
            return 1
        from .chains import cover_depth_for
        depth = cover_depth_for(ambient.alphabet_size, eps_i)
        if cover_depth_cap is not None:
            depth = min(depth, cover_depth_cap)
        tlen = len(covering_walk_cached(lam, depth))
        return max(1, -(-(window_floor * 9 // 8) // tlen))

    # first pass: per-block budgets fix n_i
    specs = []
    for i in range(1, B + 1):
        kind = "pair" if i in marks else "single"
        eps_i = deltas[i - 1] / 2
        reps = tour_reps_for(i, eps_i)
        ex = excursion
        ex_len = (len(ex[0]) + 1) if ex else 0
        if kind == "pair":
            eps_i = min(eps_i, Fraction(7, 16) * zeta)
            budget, _ = distal_budget(lam, mu1, mu2, theta, eps_i, taus[i - 1],
                                      tour_reps=reps, excursion_len=ex_len,
                                      cover_depth_cap=cover_depth_cap)
        else:
            budget, _ = approximant_budget(lam, alphas[i - 1], eps_i,
                                           tour_reps=reps, excursion_len=ex_len,
                                           cover_depth_cap=cover_depth_cap)
        specs.append({"kind": kind, "eps": eps_i, "n": budget + 1, "reps": reps})

    # second pass: minimal repetition counts against the plan inequalities
    even = alpha is not None
    Ns = []
    c_values = {}
    m = len(prefix)
    M = 0  # sum n_j N_j so far (without the prefix)
    diam = Fraction(1, ambient.alphabet_size)
    gtail = (B + 2) * Fraction(1, ambient.alphabet_size - 1)
    for i in range(1, B + 1):
        n_i = specs[i - 1]["n"]
        lo = 1 if not Ns else Ns[-1] + 1
        # domination: sum_{j<i} <= tau_i (sum_{j<i} + n_i N_i)
        need = (1 - taus[i - 1]) * M / (taus[i - 1] * n_i)
        lo = max(lo, math.ceil(need))
        # stretch cap for the next block
        if i < B:
            n_next = specs[i]["n"]
            short = Fraction(n_next, taus[i - 1]) - M
            if short > 0:
                lo = max(lo, math.ceil(short / n_i))
        # gauge inequalities bind N_i via the previous window
        if alpha is not None and i >= 2:
            k = i - 1
            Mk = m + M
            rhs = Mk * diam + gtail
            c = _minimal_c(alpha, Mk, taus[k - 1], rhs)
            c_values[k] = c
            lo = max(lo, math.floor((c + (1 - taus[k - 1]) * Mk)
                                    / (taus[k - 1] * n_i)) + 1)
        if even and lo % 2:
            lo += 1
        Ns.append(lo)
        M += n_i * lo

    # third pass: realize the block words
    blocks = []
    for i in range(1, B + 1):
        spec = specs[i - 1]
        n_i, kind, eps_i, reps = spec["n"], spec["kind"], spec["eps"], spec["reps"]
        if kind == "pair":
            p1, p2, _, segs1, segs2, _ = distal_pair_block(
                lam, mu1, mu2, theta, eps_i, taus[i - 1], n_i,
                tour_reps=reps, excursion=excursion,
                cover_depth_cap=cover_depth_cap, _return_segments=True)
            words = (p1, p2)
            segments = (tuple(segs1), tuple(segs2))
        else:
            p, segs, _ = periodic_approximant(
                lam, alphas[i - 1], eps_i, n_i, tour_reps=reps,
                excursion=excursion, cover_depth_cap=cover_depth_cap,
                _return_segments=True)
            words = (p,)
            segments = (tuple(segs),)
        blocks.append(Block(i, kind, n_i, Ns[i - 1], deltas[i - 1], taus[i - 1],
                            epss[i - 1], words, segments))

    plan = BlockPlan(ambient, lam, tuple(blocks), prefix, tuple(marks),
                     (Fraction(theta), mu1, mu2), zeta, alpha, c_values,
                     dict(meta or {}, seed=seed, window_floor=window_floor))
    problems = plan.validate()
    if problems:
        raise BudgetExceeded(problems[0], "; ".join(problems))
    return plan


def _minimal_c(alpha, Mk, tau_k, rhs):
    """Least positive c with alpha(Mk + c) * tau_k > rhs (gauge nondecreasing)."""
    hi = 1
    while not alpha.times_gt(Mk + hi, tau_k, rhs):
        hi *= 2
        if hi > 1 << 400:
            raise ArithmeticError("gauge never clears the window bound")
    lo = max(1, hi // 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if alpha.times_gt(Mk + mid, tau_k, rhs):
            hi = mid
        else:
            lo = mid + 1
    return hi


def realize(plan, xi):
    """The exact point of the plan under the selector: prefix, then N_i
    repetitions of each block (pair blocks choosing by the bracket rule)."""
    runs = []
    if plan.prefix:
        runs.append((plan.prefix, 1))
    choices = {}
    for b in plan.blocks:
        if b.kind == "pair":
            choice = plan.selection_bit(xi, b.index)
            choices[b.index] = choice
            word = b.word_for(choice)
        else:
            word = b.words[0]
        runs.append((word, b.N))
    head = RunWord(runs)
    tail = plan.blocks[-1].word_for(choices.get(plan.blocks[-1].index, 1))
    return PointProgram(plan.ambient, head, tail,
                        meta={"plan_hash": plan.plan_hash(), "xi": xi.label(),
                              "choices": choices, "kind": "realized"})
