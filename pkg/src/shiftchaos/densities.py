"""Densities of index sets, visiting times, and the twelve-case classifier.

Finite-horizon estimators are exact rational statistics over declared grids:
prefix densities over a geometric grid of prefix lengths for the ordinary
upper/lower densities, and sliding windows over the same length grid (all
window positions) for the Banach versions, so the chain

    banach_lower <= lower <= upper <= banach_upper

holds structurally.  Index sets carrying a tail rule get exact limiting
values instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np

from .words import as_word


@dataclass(frozen=True)
class IndexSet:
    """Subset of [0, horizon) plus an optional rule fixing the asymptotics.

    tail rules:
      ("periodic", start, period, phases)  -- from ``start`` on, membership is
          i in S iff (i - start) % period in phases
      ("dyadic",)                          -- S = union of [4**k, 2 * 4**k)
    """

    horizon: int
    members: tuple
    tail_rule: tuple | None = None

    def __post_init__(self):
        mem = np.asarray(self.members, dtype=np.int64)
        mem = np.unique(mem)
        if mem.size and (mem[0] < 0 or mem[-1] >= self.horizon):
            raise ValueError("members must lie in [0, horizon)")
        object.__setattr__(self, "members", tuple(int(v) for v in mem))
        if self.tail_rule is not None:
            kind = self.tail_rule[0]
            if kind == "periodic":
                _, start, period, phases = self.tail_rule
                phases = frozenset(int(p) % period for p in phases)
                object.__setattr__(self, "tail_rule", ("periodic", start, period, phases))
                for i in self.members:
                    if i >= start and (i - start) % period not in phases:
                        raise ValueError("members disagree with periodic tail rule")
            elif kind != "dyadic":
                raise ValueError(f"unknown tail rule {kind!r}")

    def positions(self):
        return np.asarray(self.members, dtype=np.int64)


@dataclass(frozen=True)
class DensityReport:
    lower: Fraction
    upper: Fraction
    banach_lower: Fraction
    banach_upper: Fraction
    exact: bool
    meta: dict = field(default_factory=dict, compare=False)

    def as_tuple(self):
        return (self.lower, self.upper, self.banach_lower, self.banach_upper)


def length_grid(horizon, floor=None, ratio=Fraction(9, 8)):
    """Geometric grid of lengths from the floor up to the horizon."""
    floor = max(1, isqrt(horizon)) if floor is None else max(1, floor)
    floor = min(floor, horizon)
    grid = []
    l = floor
    while l < horizon:
        grid.append(l)
        l = max(l + 1, int(l * ratio))
    grid.append(horizon)
    return grid


def _prefix_count(pos, n):
    return int(np.searchsorted(pos, n, side="left"))


def _max_window_count(pos, length, horizon):
    if pos.size == 0:
        return 0
    starts = np.minimum(pos, max(0, horizon - length))
    ends = np.searchsorted(pos, starts + length, side="left")
    begins = np.searchsorted(pos, starts, side="left")
    return int(np.max(ends - begins))


def _min_window_count(pos, length, horizon):
    if length >= horizon:
        return int(pos.size)
    starts = [0, horizon - length]
    if pos.size:
        after = pos + 1
        after = after[after <= horizon - length]
        starts = np.concatenate([np.array(starts, dtype=np.int64), after])
    starts = np.asarray(starts, dtype=np.int64)
    ends = np.searchsorted(pos, starts + length, side="left")
    begins = np.searchsorted(pos, starts, side="left")
    return int(np.min(ends - begins))


def densities(s, window_floor=None, prefix_floor=None):
    """Lower, upper, Banach lower, Banach upper densities of an index set.

    Exact limits when a tail rule is present; otherwise flagged finite-horizon
    estimates over the documented grids.
    """
    if s.tail_rule is not None:
        if s.tail_rule[0] == "periodic":
            _, start, period, phases = s.tail_rule
            rho = Fraction(len(phases), period)
            return DensityReport(rho, rho, rho, rho, True, {"rule": "periodic"})
        # dyadic blocks: prefix extremes at block boundaries, windows inside
        # on-blocks (ratio -> 1) and off-blocks (ratio -> 0)
        return DensityReport(Fraction(1, 3), Fraction(2, 3), Fraction(0), Fraction(1),
                             True, {"rule": "dyadic"})
    horizon = s.horizon
    pos = s.positions()
    pgrid = length_grid(horizon, prefix_floor)
    wgrid = length_grid(horizon, window_floor)
    lower = min((Fraction(_prefix_count(pos, n), n) for n in pgrid), default=Fraction(0))
    upper = max((Fraction(_prefix_count(pos, n), n) for n in pgrid), default=Fraction(0))
    b_lower = min(lower, min((Fraction(_min_window_count(pos, l, horizon), l)
                              for l in wgrid), default=Fraction(0)))
    b_upper = max(upper, max((Fraction(_max_window_count(pos, l, horizon), l)
                              for l in wgrid), default=Fraction(0)))
    meta = {"estimator": "prefix+window grids", "prefix_floor": pgrid[0],
            "window_floor": wgrid[0], "horizon": horizon}
    return DensityReport(lower, upper, b_lower, b_upper, False, meta)


def dyadic_block_set(horizon):
    """S = union of [4**k, 2*4**k) clipped to the horizon, with its tail rule."""
    members = []
    k = 0
    while 4 ** k < horizon:
        members.extend(range(4 ** k, min(2 * 4 ** k, horizon)))
        k += 1
    return IndexSet(horizon, tuple(members), ("dyadic",))


def _window_ids(arr, depth, alphabet):
    """Integer id of each depth-window of arr (positions 0..len-depth)."""
    if len(arr) < depth:
        return np.zeros(0, dtype=np.int64)
    view = np.lib.stride_tricks.sliding_window_view(arr, depth)
    weights = (alphabet ** np.arange(depth - 1, -1, -1)).astype(np.int64)
    return view.astype(np.int64) @ weights


def _id_to_word(wid, depth, alphabet):
    out = []
    for _ in range(depth):
        out.append(int(wid % alphabet))
        wid //= alphabet
    return tuple(reversed(out))


def occurrence_positions(x, horizon, depth):
    """dict word -> sorted numpy positions i < horizon with x[i:i+depth] == word."""
    alphabet = x.system.alphabet_size
    if depth * np.log2(alphabet) > 60:
        raise ValueError("scan depth too large for packed ids")
    arr = x.prefix_array(horizon + depth - 1)
    ids = _window_ids(arr, depth, alphabet)[:horizon]
    order = np.argsort(ids, kind="stable")
    sorted_ids = ids[order]
    boundaries = np.nonzero(np.diff(sorted_ids))[0] + 1
    groups = np.split(order, boundaries)
    out = {}
    for g in groups:
        if g.size:
            word = _id_to_word(int(ids[g[0]]), depth, alphabet)
            out[word] = np.sort(g).astype(np.int64)
    return out


def visiting_times(x, u, horizon):
    """Positions i < horizon where the word u starts (cylinder visit at f^i)."""
    u = as_word(u)
    alphabet = x.system.alphabet_size
    arr = x.prefix_array(horizon + len(u) - 1)
    ids = _window_ids(arr, len(u), alphabet)[:horizon]
    target = 0
    for s in u:
        target = target * alphabet + s
    pos = np.nonzero(ids == target)[0]
    return IndexSet(horizon, tuple(int(p) for p in pos))


XI_KINDS = ("banach_lower", "lower", "upper", "banach_upper")


@dataclass(frozen=True)
class OmegaEstimate:
    """Estimated statistical omega-limit supports at one reporting depth."""

    depth: int
    supports: dict  # kind -> frozenset of depth-words
    omega_full: frozenset
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        chain = [self.supports[k] for k in XI_KINDS]
        for small, big in zip(chain, chain[1:]):
            if not small <= big:
                raise ValueError("support nesting violated")
        if not chain[-1] <= self.omega_full:
            raise ValueError("B* support must lie inside omega_full")

    def to_record(self):
        from .words import word_str
        rec = {"depth": self.depth,
               "omega_full": sorted(word_str(w) for w in self.omega_full)}
        for k in XI_KINDS:
            rec[k] = sorted(word_str(w) for w in self.supports[k])
        rec["meta"] = {k: str(v) for k, v in self.meta.items()}
        return rec


def _threshold_pair(threshold):
    if isinstance(threshold, dict):
        return Fraction(threshold["prefix"]), Fraction(threshold["window"])
    t = Fraction(threshold)
    return t, t


def _passes(counts, lengths, thr, mode):
    """all/any of count/length >= thr, in exact integer arithmetic."""
    lhs = counts.astype(object) * thr.denominator
    rhs = lengths.astype(object) * thr.numerator
    ok = lhs >= rhs
    return bool(ok.all()) if mode == "all" else bool(ok.any())


def _window_max_passes(pos, lengths, horizon, thr):
    """Does some window of some grid length reach the threshold density?"""
    if pos.size == 0:
        return False
    for l in lengths:
        c = _max_window_count(pos, int(l), horizon)
        if c * thr.denominator >= thr.numerator * int(l):
            return True
    return False


def _window_min_passes(pos, lengths, horizon, thr):
    """Do all windows of every grid length reach the threshold density?

    Long windows fail first for designed points, so lengths are tried in
    descending order for an early exit."""
    for l in sorted((int(v) for v in lengths), reverse=True):
        c = _min_window_count(pos, l, horizon)
        if c * thr.denominator < thr.numerator * l:
            return False
    return True


def statistical_omega(x, horizon, depth, threshold, scan_depth=None,
                      window_floor=None, prefix_floor=None):
    """Estimate the four statistical omega-limit supports at ``depth``.

    Every length-``scan_depth`` word occurring in the first ``horizon``
    positions gets its four density estimates over the documented grids;
    words passing the threshold are projected to their length-``depth``
    prefixes.  ``scan_depth`` deeper than ``depth`` (the default is depth
    itself) lets the estimator see that shallow words shared between
    distinct orbits fail deeper refinement, which is what membership of a
    point in the omega-limit sets requires.  ``threshold`` is one positive
    rational, or a {"prefix": ..., "window": ...} pair applying separately
    to the prefix-density estimates (lower/upper) and the sliding-window
    estimates (Banach lower/upper), whose finite-horizon biases differ.
    omega_full collects the depth-words occurring past horizon/2.
    """
    thr_prefix, thr_window = _threshold_pair(threshold)
    if thr_prefix <= 0 or thr_window <= 0:
        raise ValueError("threshold must be positive")
    scan_depth = depth if scan_depth is None else scan_depth
    if scan_depth < depth:
        raise ValueError("scan depth cannot be shallower than the report depth")
    occ = occurrence_positions(x, horizon, scan_depth)
    pgrid = np.array(length_grid(horizon, prefix_floor, ratio=Fraction(5, 4)),
                     dtype=np.int64)
    wgrid = np.array(length_grid(horizon, window_floor, ratio=Fraction(2)),
                     dtype=np.int64)
    passing = {k: set() for k in XI_KINDS}
    for word, pos in occ.items():
        short = word[:depth]
        pre_counts = np.searchsorted(pos, pgrid, side="left")
        lo_ok = _passes(pre_counts, pgrid, thr_prefix, "all")
        up_ok = _passes(pre_counts, pgrid, thr_prefix, "any")
        # nesting closure: B_* inside lower, B^* outside upper; with a single
        # threshold these conjunctions are redundant (prefixes are windows)
        bu_ok = (up_ok and thr_window <= thr_prefix) or \
            _window_max_passes(pos, wgrid, horizon, thr_window)
        bl_ok = lo_ok and _window_min_passes(pos, wgrid, horizon, thr_window)
        if lo_ok:
            passing["lower"].add(short)
        if up_ok:
            passing["upper"].add(short)
        if bu_ok or up_ok:
            passing["banach_upper"].add(short)
        if bl_ok:
            passing["banach_lower"].add(short)
    tail_start = horizon // 2
    if scan_depth == depth:
        tail_words = {w for w, pos in occ.items() if pos.size and int(pos[-1]) >= tail_start}
    else:
        occ_d = occurrence_positions(x, horizon, depth)
        tail_words = {w for w, pos in occ_d.items() if pos.size and int(pos[-1]) >= tail_start}
    omega_full = frozenset(tail_words)
    # accessibility concerns the orbit tail: words that die out before the
    # tail are finite-horizon transients, so all four supports live inside
    # omega_full; intersecting preserves the per-word nesting chain
    supports = {k: frozenset(v & omega_full) for k, v in passing.items()}
    meta = {"horizon": horizon, "scan_depth": scan_depth, "threshold": threshold,
            "window_floor": window_floor, "prefix_floor": prefix_floor,
            "tail_start": tail_start}
    return OmegaEstimate(depth, supports, omega_full, meta)


CASE_IDS = ("1", "2", "3", "4", "5", "6", "1'", "2'", "3'", "4'", "5'", "6'")


def classify_case(est):
    """Match the support pattern to one of the twelve cases, else 'other'.

    The twelve cases all require an empty syndetic center; any estimate with
    nonempty Banach-lower support is 'other', as are the patterns the source
    classification leaves open.
    """
    if est.supports["banach_lower"]:
        return "other"
    d_lo = est.supports["lower"]
    d_up = est.supports["upper"]
    b_up = est.supports["banach_upper"]
    full = est.omega_full
    lo_empty = not d_lo
    eq12 = d_lo == d_up
    eq23 = d_up == b_up
    eq34 = b_up == full
    prime = "" if eq34 else "'"
    if not lo_empty and eq12 and not eq23:
        return "1" + prime
    if lo_empty and not eq12 and eq23:
        return "2" + prime
    if not lo_empty and not eq12 and eq23:
        return "3" + prime
    if lo_empty and not eq12 and not eq23:
        return "4" + prime
    if not lo_empty and not eq12 and not eq23:
        return "5" + prime
    if not lo_empty and eq12 and eq23:
        return "6" + prime
    return "other"
