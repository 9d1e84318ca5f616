"""Case presets: carriers, measure palettes, and plan parameters realizing
each of the twelve statistical structures, in irregular or level mode.

The irregular palette lives on the two-petal rose of the cycles 01 and 100:
its depth-3 language has seven words (111 stays absent as the external
insert for the primed cases), the petal word sets are sparse, junction
words witness the strict inclusions, and the mixed petal cycle 01100 plus
the petal 01 give a short-cycle surrogate for a fully supported measure.
The level palette uses a four-petal rose (01, 001, 110, 0011) whose
junctions out of 110 are restricted so 000 stays absent; the junction cycle
01110 carries the spare word 111, the observable integrals of the petals
straddle the level, and mixture weights are solved exactly.

Kill anchors sit late in each block schedule (or are absent from the early
blocks), so the prefix-density minima of the words that must leave the
lower supports decay geometrically, while surviving words keep design
frequencies a factor >= 1.5 above the thresholds.  All of this is exact
rational arithmetic; a palette that cannot express its constraints raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .chains import covering_walk_cached, embed_theta, rose_subsystem, zeta_of
from .errors import LevelOutOfRange
from .measures import (MeasurePolyline, Observable, convex_combine, integrate,
                       periodic_measure)
from .scrambled import build_plan
from .words import as_word

REPORT_DEPTH = 3
COVER_CAP = 4


@dataclass(frozen=True)
class Preset:
    case_id: str
    mode: str
    ambient: object
    carrier: object            # Lambda, or Theta for the primed cases
    base: object               # the Lambda underneath
    polyline: MeasurePolyline
    split: tuple
    phi: Observable
    level: Fraction | None
    prefix_word: tuple | None  # opening cylinder; None = recurrent route
    thresholds: dict
    scan_depth: int
    window_floor: int
    prefix_floor: int
    report_depth: int
    expected: dict
    zeta: Fraction
    excursion: tuple | None = None
    meta: dict = field(default_factory=dict)


def _tau(i):
    # strictly decreasing to zero; late blocks keep the small values that make
    # the designed density kills decisive, early blocks stay affordable
    table = (Fraction(2, 3), Fraction(1, 2), Fraction(2, 5),
             Fraction(1, 5), Fraction(1, 6), Fraction(1, 8))
    return table[i - 1] if i <= len(table) else Fraction(1, i + 2)


def cycle_mean_range(sub, phi):
    """Exact [min, max] of the observable integral over simple-cycle measures
    (the extreme invariant measures of the SFT)."""
    g = nx.DiGraph()
    for i in range(sub.n_vertices):
        for j in sub.successors(i):
            g.add_edge(i, j)
    lo = hi = None
    for cyc in nx.simple_cycles(g):
        val = integrate(periodic_measure(sub.ambient, sub.label_word(cyc)), phi)
        lo = val if lo is None or val < lo else lo
        hi = val if hi is None or val > hi else hi
    return lo, hi


def max_common_factor(c1, c2, cap=24):
    """Longest word occurring in both periodic sequences c1^inf, c2^inf."""
    c1 = as_word(c1)
    c2 = as_word(c2)
    best = 0
    for m in range(1, cap + 1):
        w1 = {tuple(c1[(i + j) % len(c1)] for j in range(m)) for i in range(len(c1))}
        w2 = {tuple(c2[(i + j) % len(c2)] for j in range(m)) for i in range(len(c2))}
        if w1 & w2:
            best = m
        else:
            return best
    return best


def _scan_depth(palette_cycles):
    deepest = REPORT_DEPTH
    cycles = [as_word(c) for c in palette_cycles]
    for i, a in enumerate(cycles):
        for b in cycles[i + 1:]:
            deepest = max(deepest, max_common_factor(a, b) + 1)
    return min(deepest, 12)


def _support3(cycles, depth=REPORT_DEPTH):
    words = set()
    for c in cycles:
        c = as_word(c)
        for i in range(len(c)):
            words.add(tuple(c[(i + j) % len(c)] for j in range(depth)))
    return frozenset(words)


def _mix(pairs):
    return convex_combine([(Fraction(w), m) for w, m in pairs])


def _mid(a, b):
    return _mix([(Fraction(1, 2), a), (Fraction(1, 2), b)])


def _solve_two(mu_lo, i_lo, mu_hi, i_hi, a):
    """theta with theta*i_lo + (1-theta)*i_hi == a, in (0, 1)."""
    theta = (i_hi - a) / (i_hi - i_lo)
    if not 0 < theta < 1:
        raise LevelOutOfRange("mixture weight escapes (0,1)")
    return _mix([(theta, mu_lo), (1 - theta, mu_hi)]), theta


IRR_A = (0, 1)
IRR_B = (1, 0, 0)
IRR_AB = (0, 1, 1, 0, 0)      # petal-0 then petal-1 of the irregular rose
LEVEL_PETALS = ((0, 1), (0, 0, 1), (1, 1, 0), (0, 0, 1, 1))
LEVEL_J = [(i, j) for i in range(4) for j in range(4)
           if not (i == 2 and j in (1, 3))]   # keep 000 out of the language
LEVEL_C111 = (0, 1, 1, 1, 0)  # petal-0 then petal-2: carries the spare 111


def _config(case_digit, anchors, split_anchor, split, schedule, exp_lo, exp_up):
    return {"anchors": anchors, "split_anchor": split_anchor, "split": split,
            "schedule": schedule, "exp_lo": exp_lo, "exp_up": exp_up}


def _irregular_configs(ambient):
    lam = rose_subsystem(ambient, [IRR_A, IRR_B], provenance="irregular rose")
    m_a = periodic_measure(ambient, IRR_A)
    m_b = periodic_measure(ambient, IRR_B)
    m_ab = periodic_measure(ambient, IRR_AB)
    phi = Observable(2, {(0, 0): Fraction(1), (0, 1): Fraction(0),
                         (1, 0): Fraction(0), (1, 1): Fraction(0)})
    mu_full = _mix([(Fraction(3, 10), m_a), (Fraction(7, 10), m_ab)])
    nu_full = _mix([(Fraction(2, 5), m_a), (Fraction(3, 5), m_ab)])
    vals = [integrate(m, phi) for m in (m_a, m_b, mu_full, nu_full)]
    if len(set(vals)) != 4:
        raise LevelOutOfRange("irregular palette integrals are not distinct")
    half = _mid(m_a, m_b)
    quarter = _mix([(Fraction(1, 4), m_a), (Fraction(3, 4), m_b)])
    nu3 = _mix([(Fraction(1, 4), m_a), (Fraction(3, 4), mu_full)])
    w_a = _support3([IRR_A])
    w_b = _support3([IRR_B])
    w_ab = _support3([IRR_AB])
    full = w_a | w_ab
    configs = {
        "1": _config("1", [half, quarter], half, (Fraction(1, 2), m_a, m_b),
                     [_mid(half, quarter), quarter, _mid(half, quarter), quarter],
                     w_a | w_b, w_a | w_b),
        "2": _config("2", [m_a, mu_full, m_b], mu_full,
                     (Fraction(1, 2), mu_full, mu_full),
                     [_mid(mu_full, m_b), m_b, _mid(mu_full, m_b), m_b],
                     frozenset(), full | w_b),
        "3": _config("3", [m_a, nu3], nu3, (Fraction(1, 4), m_a, mu_full),
                     [_mid(m_a, nu3), m_a, _mid(m_a, nu3), m_a],
                     w_a, full),
        "4": _config("4", [m_a, half, m_b], half, (Fraction(1, 2), m_a, m_b),
                     [_mid(half, m_a), m_a, _mid(half, m_b), m_b],
                     frozenset(), w_a | w_b),
        "5": _config("5", [m_a, half], half, (Fraction(1, 2), m_a, m_b),
                     [_mid(m_a, half), m_a, _mid(m_a, half), m_a],
                     w_a, w_a | w_b),
        "6": _config("6", [mu_full, nu_full], mu_full,
                     (Fraction(1, 2), mu_full, mu_full),
                     [_mid(mu_full, nu_full), nu_full, _mid(mu_full, nu_full),
                      nu_full],
                     full, full),
    }
    palette = [IRR_A, IRR_B, IRR_AB]
    return lam, phi, None, configs, palette, (1, 1, 1)


def _level_configs(ambient, a):
    a = Fraction(a)
    lam = rose_subsystem(ambient, list(LEVEL_PETALS), junctions=LEVEL_J,
                         provenance="level rose")
    phi = Observable(2, {(0, 0): Fraction(1, 4), (0, 1): Fraction(1, 32),
                         (1, 0): Fraction(1, 32), (1, 1): Fraction(7, 8)})
    lo, hi = cycle_mean_range(lam, phi)
    if not lo < a < hi:
        raise LevelOutOfRange(f"level {a} outside the attainable interval ({lo}, {hi})")
    mus = {c: periodic_measure(ambient, c) for c in LEVEL_PETALS + (LEVEL_C111,)}
    ints = {c: integrate(m, phi) for c, m in mus.items()}
    below = sorted((c for c in LEVEL_PETALS if ints[c] < a), key=lambda c: ints[c])
    above = sorted((c for c in LEVEL_PETALS if ints[c] > a), key=lambda c: ints[c])
    if len(below) < 2 or len(above) < 2:
        raise LevelOutOfRange("need two petal integrals on each side of the level")
    c1, c2 = below[0], below[1]
    c3, c4 = above[0], above[1]
    nu1, _ = _solve_two(mus[c1], ints[c1], mus[c3], ints[c3], a)
    nu2, _ = _solve_two(mus[c2], ints[c2], mus[c4], ints[c4], a)
    nu3, _ = _solve_two(mus[c1], ints[c1], mus[c4], ints[c4], a)
    if ints[LEVEL_C111] <= a:
        raise LevelOutOfRange("junction cycle integral must exceed the level")
    mu_full, _ = _solve_two(mus[c1], ints[c1], mus[LEVEL_C111],
                            ints[LEVEL_C111], a)
    nu_c3 = _mix([(Fraction(1, 3), nu1), (Fraction(2, 3), mu_full)])
    th1 = nu1.atoms[0][0]
    w1 = _support3([c1, c3])
    w2 = _support3([c2, c4])
    full = _support3([c1, LEVEL_C111])
    configs = {
        "1": _config("1", [nu1], nu1, (th1, mus[c1], mus[c3]), None, w1, w1),
        "2": _config("2", [nu1, mu_full, nu2], mu_full,
                     (Fraction(1, 2), mu_full, mu_full),
                     [_mid(mu_full, nu2), nu2, _mid(mu_full, nu2), nu2],
                     frozenset(), full | w2),
        "3": _config("3", [nu1, nu_c3], nu_c3, (Fraction(1, 3), nu1, mu_full),
                     [_mid(nu1, nu_c3), nu1, _mid(nu1, nu_c3), nu1],
                     w1, full | w1),
        "4": _config("4", [nu1, _mid(nu1, nu2), nu2], _mid(nu1, nu2),
                     (Fraction(1, 2), nu1, nu2),
                     [_mid(_mid(nu1, nu2), nu2), nu2,
                      _mid(_mid(nu1, nu2), nu1), nu1],
                     frozenset(), w1 | w2),
        "5": _config("5", [nu1, nu3], nu1, (nu1.atoms[0][0], mus[c1], mus[c3]),
                     [_mid(nu1, nu3), nu3, _mid(nu1, nu3), nu3],
                     _support3([c1]), _support3([c1, c3, c4])),
        "6": _config("6", [mu_full], mu_full,
                     (Fraction(1, 2), mu_full, mu_full), None, full, full),
    }
    palette = list(LEVEL_PETALS) + [LEVEL_C111]
    return lam, phi, a, configs, palette, (0, 0, 0)


def preset_K(case_id, mode, ambient, level=Fraction(1, 4), recurrent=False):
    """Target polyline, carrier (Lambda or Theta), split, and verification
    parameters realizing the requested case at the report depth.

    mode "irregular" needs base measures with distinct observable integrals;
    mode "level" solves all mixture weights exactly against the level, and
    raises LevelOutOfRange when the level leaves the attainable interval.
    With ``recurrent`` the opening word stays inside the carrier (the
    recurrent-not-transitive route); otherwise it is an external cylinder.
    """
    primed = case_id.endswith("'")
    digit = case_id.rstrip("'")
    if digit not in ("1", "2", "3", "4", "5", "6"):
        raise ValueError(f"unknown case id {case_id!r}")
    if mode == "irregular":
        lam, phi, level_val, configs, palette, insert_symbol = _irregular_configs(ambient)
    elif mode == "level":
        lam, phi, level_val, configs, palette, insert_symbol = _level_configs(ambient, level)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    cfg = configs[digit]
    carrier = lam
    excursion = None
    theta_extra3 = frozenset()
    if primed:
        flank = 1 - insert_symbol[0]
        exit_v = next(v for v in range(lam.n_vertices) if lam.labels[v] == flank)
        entry_v = next(v for v in range(lam.n_vertices) if lam.labels[v] == flank)
        carrier, _ = embed_theta(lam, ambient, insert=(insert_symbol, exit_v, entry_v))
        excursion = (insert_symbol, exit_v, entry_v)
        theta_extra3 = frozenset(carrier._theta_extra_words(REPORT_DEPTH)) \
            - frozenset(lam.language(REPORT_DEPTH))
    if recurrent:
        prefix = None
    else:
        prefix = insert_symbol + (insert_symbol[0],) if primed else insert_symbol

    tour_len = len(covering_walk_cached(lam, COVER_CAP))
    window_floor = -(-4 * tour_len // 64) * 64
    thresholds = {"prefix": Fraction(1, 15) if mode == "irregular" else Fraction(1, 30),
                  "window": Fraction(1, 2 * tour_len)}
    line = MeasurePolyline(cfg["anchors"], Fraction(1, 2), cfg["split_anchor"],
                           schedule=cfg["schedule"])
    lang3 = frozenset(lam.language(REPORT_DEPTH))
    expected = {
        "banach_lower": frozenset(),
        "lower": cfg["exp_lo"],
        "upper": cfg["exp_up"],
        "banach_upper": lang3,
        "omega_full": lang3 | theta_extra3,
    }
    from .chains import _mix as chain_mix
    split_measure = chain_mix(cfg["split"][1], cfg["split"][2], cfg["split"][0])
    return Preset(case_id, mode, ambient, carrier, lam, line, cfg["split"], phi,
                  level_val, prefix, thresholds, _scan_depth(palette),
                  window_floor, 8 * window_floor, REPORT_DEPTH, expected,
                  zeta_of(ambient, [split_measure]), excursion,
                  {"palette": tuple(palette)})


def build_preset_plan(preset, blocks=6, seed=0, alpha=None):
    """Materialize the preset's plan with the preset's schedules."""
    return build_plan(
        preset.polyline, preset.carrier, preset.split, alpha, blocks,
        ambient=preset.ambient, prefix_word=preset.prefix_word,
        tau=_tau, window_floor=preset.window_floor,
        excursion=preset.excursion, cover_depth_cap=COVER_CAP, seed=seed,
        meta={"case_id": preset.case_id, "mode": preset.mode,
              "recurrent": preset.prefix_word is None})


def verification_kwargs(preset):
    return {"scan_depth": preset.scan_depth,
            "window_floor": preset.window_floor,
            "prefix_floor": preset.prefix_floor,
            "threshold": preset.thresholds}
