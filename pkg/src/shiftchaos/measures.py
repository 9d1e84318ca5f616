"""Exact invariant-measure arithmetic on periodic-orbit combinations.

Measures are rational convex combinations of periodic-orbit measures; every
cylinder weight is a Fraction computed by counting occurrences in the cyclic
words.  The weak* metric uses cylinder indicators enumerated by length then
lexicographic order, so a truncation at K cylinders carries the exact error
bound 2**(-K).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AnchorNotOnPolyline, BadWeights, DepthMismatch, NotPeriodic
from .shiftspace import check_cycle, language
from .words import RunWord, as_word, word_str


def _cycle_runword(cycle):
    return cycle if isinstance(cycle, RunWord) else RunWord.from_word(as_word(cycle))


class Measure:
    """Rational convex combination of periodic-orbit measures."""

    def __init__(self, system, atoms, name=None):
        self.system = system
        merged = {}
        for weight, cycle in atoms:
            weight = Fraction(weight)
            if weight < 0:
                raise BadWeights("negative atom weight")
            if weight == 0:
                continue
            rw = _cycle_runword(cycle)
            merged[rw] = merged.get(rw, Fraction(0)) + weight
        if sum(merged.values(), Fraction(0)) != 1:
            raise BadWeights("atom weights must sum to 1")
        self.atoms = tuple(sorted(merged.items(), key=lambda kv: (len(kv[0]), kv[0].runs)))
        self.atoms = tuple((w, c) for c, w in self.atoms)
        self.name = name
        self._tables = {}

    def cylinder(self, u):
        """Exact weight of the cylinder [u]."""
        u = as_word(u)
        total = Fraction(0)
        for weight, cycle in self.atoms:
            total += weight * Fraction(cycle.count(u, cyclic=True), len(cycle))
        return total

    def table(self, depth):
        """All nonzero cylinder weights at the given depth."""
        if depth not in self._tables:
            tab = {}
            for weight, cycle in self.atoms:
                n = len(cycle)
                for u, c in cycle.window_counts(depth, cyclic=True).items():
                    tab[u] = tab.get(u, Fraction(0)) + weight * Fraction(c, n)
            self._tables[depth] = tab
        return self._tables[depth]

    def support_words(self, depth):
        return frozenset(self.table(depth))

    def __eq__(self, other):
        if isinstance(other, Measure):
            return self.system == other.system and self.atoms == other.atoms
        return NotImplemented

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        if self.name:
            return f"Measure({self.name})"
        inner = " + ".join(f"{w}*orb({word_str(c.to_tuple()) if len(c) <= 24 else repr(c)})"
                           for w, c in self.atoms[:3])
        return f"Measure({inner}{'...' if len(self.atoms) > 3 else ''})"


def periodic_measure(system, cycle):
    """Uniform measure on the periodic orbit of the cycle."""
    if isinstance(cycle, RunWord):
        # admissibility: every wrapped window of depth 2 must be admissible
        from .shiftspace import is_admissible
        for u in cycle.windows(2, cyclic=True) if len(cycle) > 1 else set():
            if not is_admissible(system, u):
                raise NotPeriodic("cycle repetition is inadmissible")
    else:
        cycle = check_cycle(system, cycle)
    return Measure(system, [(Fraction(1), cycle)])


def empirical_measure(x, n, depth):
    """Depth-m cylinder table of the empirical measure along x's first n steps.

    weight(u) = |{0 <= i < n : x[i:i+m] == u}| / n, exact.
    """
    if n < 1:
        raise ValueError("n must be positive")
    counts = x.window_counts_prefix(n, depth)
    return {u: Fraction(c, n) for u, c in counts.items()}


def _cylinder_weight(obj, u):
    if isinstance(obj, Measure):
        return obj.cylinder(u)
    # plain table: dict word -> Fraction, all of one depth
    if u in obj:
        return obj[u]
    depths = {len(w) for w in obj}
    if depths and len(u) != next(iter(depths)):
        raise DepthMismatch(f"table has depth {next(iter(depths))}, cylinder has depth {len(u)}")
    return Fraction(0)


def cylinder_enumeration(system, count):
    """First ``count`` admissible cylinders, by length then lexicographic order."""
    out = []
    depth = 1
    while len(out) < count:
        out.extend(language(system, depth))
        depth += 1
    return out[:count]


def weakstar_distance(mu, nu, system=None, truncation=16):
    """Truncated weak* distance sum(2**-k |mu(C_k) - nu(C_k)|) and its tail bound.

    C_k is the k-th cylinder in length-lexicographic enumeration; the
    neglected tail is at most 2**(-truncation).
    """
    if system is None:
        system = mu.system if isinstance(mu, Measure) else nu.system
    value = Fraction(0)
    for k, u in enumerate(cylinder_enumeration(system, truncation), start=1):
        diff = _cylinder_weight(mu, u) - _cylinder_weight(nu, u)
        value += Fraction(1, 2 ** k) * abs(diff)
    return value, Fraction(1, 2 ** truncation)


def convex_combine(parts):
    """Combine (weight, Measure) pairs into one measure; weights must sum to 1."""
    parts = [(Fraction(w), m) for w, m in parts]
    if any(w < 0 for w, _ in parts):
        raise BadWeights("negative weight")
    if sum(w for w, _ in parts) != 1:
        raise BadWeights("weights must sum to 1")
    system = parts[0][1].system
    atoms = []
    for w, m in parts:
        for aw, cycle in m.atoms:
            atoms.append((w * aw, cycle))
    return Measure(system, atoms)


def integrate(mu, phi):
    """Exact integral of a locally constant observable."""
    total = Fraction(0)
    if isinstance(mu, Measure):
        for u, v in phi.table.items():
            w = mu.cylinder(u)
            if w:
                total += v * w
        return total
    depths = {len(w) for w in mu}
    if depths and next(iter(depths)) < phi.depth:
        raise DepthMismatch(f"observable depth {phi.depth} exceeds table depth {next(iter(depths))}")
    for u, w in mu.items():
        total += phi.table.get(u[: phi.depth], Fraction(0)) * w
    return total


@dataclass(frozen=True)
class Observable:
    """Locally constant function given by a table on length-m words."""

    depth: int
    table: dict

    def __post_init__(self):
        object.__setattr__(self, "table",
                           {as_word(u): Fraction(v) for u, v in self.table.items()})
        if any(len(u) != self.depth for u in self.table):
            raise ValueError("table words must all have the observable's depth")

    def value_on(self, u):
        u = as_word(u)
        if len(u) < self.depth:
            raise DepthMismatch("word shorter than observable depth")
        return self.table.get(u[: self.depth], Fraction(0))

    def check_total(self, system):
        missing = [u for u in language(system, self.depth) if u not in self.table]
        if missing:
            raise ValueError(f"observable undefined on {len(missing)} admissible words")
        return True

    def to_text(self):
        lines = [f"depth {self.depth}"]
        for u in sorted(self.table):
            v = self.table[u]
            lines.append(f"{word_str(u)} {v.numerator}/{v.denominator}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        depth = None
        table = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition(" ")
            if key == "depth":
                depth = int(val)
            else:
                num, _, den = val.partition("/")
                table[key] = Fraction(int(num), int(den or 1))
        return cls(depth, table)


def indicator(system, u):
    """Observable: indicator of the cylinder [u]."""
    u = as_word(u)
    return Observable(len(u), {u: Fraction(1)})


def measure_to_text(mu):
    lines = []
    for w, cycle in mu.atoms:
        lines.append(f"{w.numerator}/{w.denominator} {word_str(cycle.to_tuple())}")
    return "\n".join(lines) + "\n"


def measure_from_text(system, text):
    atoms = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        wpart, _, cpart = line.partition(" ")
        num, _, den = wpart.partition("/")
        from .words import parse_word
        atoms.append((Fraction(int(num), int(den or 1)), parse_word(cpart)))
    return Measure(system, atoms)


class MeasurePolyline:
    """A polyline of measures together with the marked alpha-sequence scheme.

    The emitted sequence walks the polyline in sweeps; sweep s subdivides
    every edge into 2**s steps and tours the path there and back starting at
    the split anchor, which is emitted twice at each sweep start.  The
    positions of those doubled anchors are the marked set S1 (1-based block
    indices), their gaps are at least 2, and consecutive emitted measures are
    within one sweep step of each other.
    """

    def __init__(self, anchors, mesh, mu_anchor, schedule=None):
        if not anchors:
            raise ValueError("polyline needs at least one anchor")
        self.anchors = list(anchors)
        self.mesh = Fraction(mesh)
        try:
            self.anchor_index = self.anchors.index(mu_anchor)
        except ValueError:
            raise AnchorNotOnPolyline("split measure must be one of the polyline anchors")
        self.mu = mu_anchor
        # optional explicit visit order for the first materialized blocks
        # (after the doubled split anchor); entries must lie on the polyline
        self.schedule = list(schedule) if schedule else None
        # construction-time check: one sweep step moves at most ~mesh in weak*
        if len(self.anchors) > 1:
            for a, b in zip(self.anchors, self.anchors[1:]):
                mid = convex_combine([(Fraction(1, 2), a), (Fraction(1, 2), b)])
                d, _ = weakstar_distance(a, mid, truncation=10)
                if d > self.mesh:
                    raise ValueError("polyline edge exceeds the declared mesh at half step")

    def _mix(self, i, t):
        """Point at parameter t in [0,1] along edge i -> i+1."""
        t = Fraction(t)
        if t == 0:
            return self.anchors[i]
        if t == 1:
            return self.anchors[i + 1]
        return convex_combine([(1 - t, self.anchors[i]), (t, self.anchors[i + 1])])

    def _sweep_points(self, s):
        """Subdivision tour of sweep s: away from the anchor and back."""
        if len(self.anchors) == 1:
            return [self.anchors[0]]
        step = Fraction(1, 2 ** s)
        path = []
        for i in range(len(self.anchors) - 1):
            t = Fraction(0)
            while t < 1:
                path.append((i, t))
                t += step
        path.append((len(self.anchors) - 2, Fraction(1)))
        # locate the anchor on the subdivision path
        a = self.anchor_index
        pos = path.index((a, Fraction(0))) if a < len(self.anchors) - 1 \
            else len(path) - 1
        tour = path[pos + 1:] + path[-2::-1] + path[1:pos + 1]
        return [self._mix(i, t) for i, t in tour]

    def emit(self, count):
        """First ``count`` alphas and the 1-based marked index set S1."""
        if self.schedule is not None:
            alphas = [self.mu, self.mu] + list(self.schedule)
            marks = [1]
            s = 1
            while len(alphas) < count:
                marks.append(len(alphas) + 1)
                alphas.append(self.mu)
                alphas.append(self.mu)
                alphas.extend(self._sweep_points(s) if len(self.anchors) > 1
                              else [self.mu])
                s += 1
            return alphas[:count], [m for m in marks if m <= count]
        if len(self.anchors) == 1:
            return [self.mu] * count, list(range(1, count + 1, 2))
        alphas = []
        marks = []
        s = 1
        while len(alphas) < count:
            marks.append(len(alphas) + 1)
            alphas.append(self.mu)
            alphas.append(self.mu)
            alphas.extend(self._sweep_points(s))
            s += 1
        marks = [m for m in marks if m <= count]
        return alphas[:count], marks
