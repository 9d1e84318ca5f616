"""Chain machinery on labeled graphs: bridges, ICM certificates, periodic
approximants, distal pair blocks, rose subsystems, and the Theta enlargement.

A Subsystem is an SFT presented by a labeled directed graph (vertices carry
ambient symbols).  Constructions produce closed walks on such graphs, so
admissibility is structural, and every certificate is decided by exact
counting on the resulting run-length-encoded words.  Pseudo-orbit gluing is
replaced by exact bridging, all bridges inside one construction having one
uniform length so that paired walks stay coordinate-aligned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (ApproximantFailure, BudgetTooSmall, NoExternalWord, NoPath,
                     NotDistal, NotPeriodic)
from .measures import Measure, convex_combine, weakstar_distance
from .shiftspace import PointProgram, is_admissible, is_primitive
from .words import RunWord, as_word, word_str


@dataclass(frozen=True)
class Chain:
    """A finite chain of blocks with its gluing tolerance (symbolic: exact)."""

    entries: tuple
    tolerance: Fraction
    connects: tuple  # (from_word, to_word)


@dataclass(frozen=True)
class ThetaInfo:
    insert: tuple          # ambient word absent from the base language
    exit_vertex: int       # vertex whose label precedes the insert
    entry_vertex: int      # vertex where the walk resumes after the insert
    pre_path: tuple = ()   # canonical vertex path ending at the exit
    post_path: tuple = ()  # canonical vertex path starting at the entry
    gap_rule: str = "gap before the i-th insert is 2^i times the length so far"


@dataclass(frozen=True)
class Subsystem:
    """Vertex-labeled SFT inside an ambient shift system."""

    ambient: object
    labels: tuple
    matrix: tuple
    provenance: str = ""
    petals: tuple = ()          # distinguished vertex cycles, if any
    dist_pair_sep: Fraction | None = None
    theta: ThetaInfo | None = None

    def __post_init__(self):
        n = len(self.labels)
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise ValueError("matrix shape must match the vertex count")
        for i, row in enumerate(self.matrix):
            for j, v in enumerate(row):
                if v and not _ambient_edge(self.ambient, self.labels[i], self.labels[j]):
                    raise ValueError(f"edge {i}->{j} is not ambient-admissible")

    @property
    def n_vertices(self):
        return len(self.labels)

    def successors(self, v):
        return [j for j, e in enumerate(self.matrix[v]) if e]

    def label_word(self, path):
        return tuple(self.labels[v] for v in path)

    @property
    def fixed_point_free(self):
        # a fixed point of the subshift is a monochromatic cycle in the graph
        for s in set(self.labels):
            verts = [v for v in range(self.n_vertices) if self.labels[v] == s]
            if _has_cycle(self.matrix, verts):
                return False
        return True

    def language(self, m):
        """Admissible label words of length m, sorted."""
        words = set()
        paths = [(v,) for v in range(self.n_vertices)]
        for _ in range(m - 1):
            paths = [p + (w,) for p in paths for w in self.successors(p[-1])]
        for p in paths:
            words.add(self.label_word(p))
        if self.theta is not None:
            words |= self._theta_extra_words(m)
        return sorted(words)

    def _theta_extra_words(self, m):
        # the enlargement's insert always appears in its one canonical
        # context, so the extra words are the windows of that chunk
        t = self.theta
        chunk = self.label_word(t.pre_path) + t.insert + self.label_word(t.post_path)
        if len(chunk) < m:
            return set()
        return {chunk[i:i + m] for i in range(len(chunk) - m + 1)}

    def word_admissible(self, u):
        """True iff some vertex path carries the label word u."""
        u = as_word(u)
        states = {v for v in range(self.n_vertices) if self.labels[v] == u[0]}
        for s in u[1:]:
            states = {w for v in states for w in self.successors(v) if self.labels[w] == s}
            if not states:
                return False
        return True

    def vertex_cycle_for(self, cycle_word):
        """Lexicographically least vertex cycle carrying the cyclic label word."""
        cycle_word = as_word(cycle_word)
        for start in range(self.n_vertices):
            if self.labels[start] != cycle_word[0]:
                continue
            path = self._complete_cycle([start], cycle_word)
            if path is not None:
                return path
        raise NotPeriodic(f"cycle {word_str(cycle_word)} has no vertex realization")

    def _complete_cycle(self, path, cycle_word):
        if len(path) == len(cycle_word):
            return path if self.matrix[path[-1]][path[0]] else None
        for w in sorted(self.successors(path[-1])):
            if self.labels[w] == cycle_word[len(path)]:
                done = self._complete_cycle(path + [w], cycle_word)
                if done is not None:
                    return done
        return None

    def path_exact(self, u, v, length, cap=4096):
        """Deterministic vertex path u -> v with exactly ``length`` edges."""
        if length <= cap:
            p = _path_exact_dp(self.matrix, u, v, length)
            if p is None:
                raise NoPath(f"no path {u}->{v} of length {length}")
            return p
        cyc = _shortest_cycle_through(self.matrix, v)
        if cyc is None:
            raise NoPath(f"vertex {v} lies on no cycle")
        g = len(cyc)
        loops = (length - cap // 2) // g
        base = self.path_exact(u, v, length - loops * g, cap=cap)
        loop = cyc[1:] + [v]  # cyc starts at v; edges v->cyc[1], ..., last->v
        return base + loop * loops

    def covering_walk(self, depth):
        """Closed vertex walk whose labels contain every depth-word, threaded
        greedily with shortest continuations for compactness."""
        targets = self._word_paths(depth)
        if not targets:
            raise ValueError("empty language")
        order = sorted(targets)
        walk = list(targets[order[0]])

        def covered():
            got = set()
            for i in range(len(walk) - depth + 1):
                got.add(self.label_word(walk[i:i + depth]))
            return got

        remaining = [w for w in order if w not in covered()]
        while remaining:
            best = None
            for w in remaining:
                ext = self._extend_to(walk[-1], targets[w])
                if best is None or (len(ext), w) < (len(best[0]), best[1]):
                    best = (ext, w)
            walk.extend(best[0])
            got = covered()
            remaining = [w for w in remaining if w not in got]
        if walk[-1] == walk[0] and len(walk) > 1:
            walk = walk[:-1]
        if not self.matrix[walk[-1]][walk[0]]:
            back = _shortest_path(self.matrix, walk[-1], walk[0])
            if back is None:
                raise NoPath("could not close covering walk")
            walk.extend(back[1:-1])
        return walk

    def _word_paths(self, depth):
        """word -> lexicographically least vertex path carrying it."""
        paths = [(v,) for v in range(self.n_vertices)]
        for _ in range(depth - 1):
            paths = [p + (w,) for p in paths for w in sorted(self.successors(p[-1]))]
        out = {}
        for p in paths:
            w = self.label_word(p)
            if w not in out:
                out[w] = list(p)
        return out

    def _extend_to(self, v, path):
        """Shortest continuation from v ending with the vertex path ``path``."""
        if self.matrix[v][path[0]]:
            return list(path)
        conn = _shortest_path(self.matrix, v, path[0])
        if conn is None:
            raise NoPath(f"no connector from {v} to {path[0]}")
        return conn[1:] + list(path[1:])

    def to_text(self):
        lines = ["# shiftchaos subsystem v1", f"provenance {self.provenance}"]
        lines.append("labels " + ".".join(str(s) for s in self.labels))
        for row in self.matrix:
            lines.append("matrix " + "".join(str(int(bool(v))) for v in row))
        for petal in self.petals:
            lines.append("petal " + ".".join(str(v) for v in petal))
        if self.theta is not None:
            lines.append("theta_insert " + word_str(self.theta.insert))
            lines.append(f"theta_exit {self.theta.exit_vertex}")
            lines.append(f"theta_entry {self.theta.entry_vertex}")
        return "\n".join(lines) + "\n"


def _ambient_edge(ambient, a, b):
    if ambient.kind == "full":
        return 0 <= a < ambient.alphabet_size and 0 <= b < ambient.alphabet_size
    if ambient.kind == "sft":
        return bool(ambient.transition[a][b])
    raise ValueError("construction substrates are full shifts and SFTs only")


def _has_cycle(matrix, verts):
    vset = set(verts)
    color = {}

    def dfs(v):
        color[v] = 1
        for w in vset:
            if matrix[v][w]:
                if color.get(w) == 1:
                    return True
                if w not in color and dfs(w):
                    return True
        color[v] = 2
        return False

    return any(dfs(v) for v in verts if v not in color)


def canonical_context(matrix, exit_vertex, entry_vertex, ctx_len=8):
    """Deterministic flanking vertex paths for an insertion: the lex-least
    walk of ctx_len vertices ending at the exit, and the lex-least walk of
    ctx_len vertices starting at the entry."""
    pre = [exit_vertex]
    while len(pre) < ctx_len:
        preds = [u for u in range(len(matrix)) if matrix[u][pre[0]]]
        if not preds:
            break
        pre.insert(0, min(preds))
    post = [entry_vertex]
    while len(post) < ctx_len:
        succs = [w for w in range(len(matrix)) if matrix[post[-1]][w]]
        if not succs:
            break
        post.append(min(succs))
    return tuple(pre), tuple(post)


def _shortest_path(matrix, u, v):
    """Lexicographically least among shortest vertex paths u -> v."""
    if u == v:
        return [u]
    frontier = [[u]]
    seen = {u}
    while frontier:
        nxt = []
        for p in frontier:
            for w in sorted(j for j, e in enumerate(matrix[p[-1]]) if e):
                if w == v:
                    return p + [w]
                if w not in seen:
                    seen.add(w)
                    nxt.append(p + [w])
        frontier = nxt
    return None


def _shortest_cycle_through(matrix, v):
    best = None
    for w in sorted(j for j, e in enumerate(matrix[v]) if e):
        p = _shortest_path(matrix, w, v)
        if p is not None:
            cyc = [v] + p[:-1]
            if best is None or len(cyc) < len(best):
                best = cyc
    return best


def _path_exact_dp(matrix, u, v, length):
    """Lexicographically least path u -> v with exactly ``length`` edges."""
    n = len(matrix)
    feas = [[False] * n for _ in range(length + 1)]
    feas[length][v] = True
    for step in range(length - 1, -1, -1):
        frow = feas[step + 1]
        for x in range(n):
            row = matrix[x]
            feas[step][x] = any(row[y] and frow[y] for y in range(n))
    if not feas[0][u]:
        return None
    path = [u]
    for step in range(1, length + 1):
        row = matrix[path[-1]]
        frow = feas[step]
        for y in range(n):
            if row[y] and frow[y]:
                path.append(y)
                break
    return path


def ambient_subsystem(system):
    """The ambient system itself, presented as a labeled graph."""
    n = system.alphabet_size
    if system.kind == "full":
        matrix = tuple(tuple(1 for _ in range(n)) for _ in range(n))
    elif system.kind == "sft":
        matrix = system.transition
    else:
        raise ValueError("construction substrates are full shifts and SFTs only")
    return Subsystem(system, tuple(range(n)), matrix, provenance="ambient")


def bridge(system, a, b, l):
    """Lexicographically least word w of length l with a + w + b admissible."""
    a = as_word(a)
    b = as_word(b)
    if not (is_admissible(system, a) and is_admissible(system, b)):
        raise ValueError("endpoints must be admissible")
    if l == 0:
        if system.kind == "full" or system.transition[a[-1]][b[0]]:
            return ()
        raise NoPath("endpoints not adjacent")
    if system.kind == "full":
        return (0,) * l
    if system.kind != "sft":
        raise ValueError("bridging is defined for full shifts and SFTs")
    path = _path_exact_dp(system.transition, a[-1], b[0], l + 1)
    if path is None:
        raise NoPath(f"no connecting word of length {l}")
    return tuple(path[1:-1])


def certify_icm(sub):
    """(certified, mixing index) for the carrier graph.

    For a Theta subsystem the carrier is its contained base; an internally
    chain mixing subset inside an internally chain transitive omega-limit set
    certifies the enlargement, so the base's certificate is the answer."""
    return is_primitive(sub.matrix)


# -- budgets ---------------------------------------------------------------

_COVER_CACHE = {}


def covering_walk_cached(sub, depth):
    key = (id(sub), depth)
    if key not in _COVER_CACHE:
        _COVER_CACHE[key] = sub.covering_walk(depth)
    return _COVER_CACHE[key]


def cover_depth_for(base, eps):
    """Least m with base**-(m+1) < eps: visiting every depth-m cylinder makes
    an orbit eps-dense."""
    eps = Fraction(eps)
    m = 0
    while Fraction(1, base ** (m + 1)) >= eps:
        m += 1
        if m > 14:
            raise ApproximantFailure("eps too small: covering depth exceeds 14")
    return max(1, m)


def _truncation_for(eps):
    eps = Fraction(eps)
    k = 2
    while Fraction(1, 2 ** k) >= eps / 4:
        k += 1
    return k


def _weight_denominator(measure):
    d = 1
    for w, _ in measure.atoms:
        d = d * w.denominator // math.gcd(d, w.denominator)
    return d


def _bridge_len(sub):
    ok, idx = is_primitive(sub.matrix)
    if not ok:
        raise ApproximantFailure("construction needs a primitive (mixing) carrier")
    return max(idx, 1)


def approximant_budget(sub, target, eps, *, tour_reps=1, excursion_len=0,
                       require_cover=True, cover_depth_cap=None):
    """Least length M the construction certifies below tolerance eps.

    Mirrors the proof shape M = (s+m+1)L + bk: the overhead (covering tour,
    uniform bridges, excursion, closing pad) plus a periodic part respecting
    the weight denominator and large enough that the overhead's perturbation
    of the first K cylinder weights stays below eps.
    """
    eps = Fraction(eps)
    base = sub.ambient.alphabet_size
    depth = cover_depth_for(base, eps) if require_cover else 1
    if cover_depth_cap is not None:
        depth = min(depth, cover_depth_cap)
    tour_len = len(covering_walk_cached(sub, depth)) if require_cover else 0
    L = _bridge_len(sub)
    n_segs = len(target.atoms) + 3
    cyc_total = sum(len(c) for _, c in target.atoms)
    cyc_max = max(len(c) for _, c in target.atoms)
    pad_max = L + 2 * cyc_max + cyc_total
    overhead = (tour_len * max(tour_reps, 1 if require_cover else 0)
                + excursion_len + 2 + n_segs * L + pad_max)
    b = _weight_denominator(target)
    trunc = _truncation_for(eps)
    sens = 4 * (overhead + n_segs * (trunc + 1))
    periodic_min = max(2 * b * cyc_max, math.ceil(Fraction(sens, eps)))
    M = overhead + periodic_min
    return M, {"overhead": overhead, "tour_len": tour_len, "bridge_len": L,
               "denominator": b, "cover_depth": depth, "truncation": trunc,
               "segments": n_segs}


def distal_budget(sub, mu1, mu2, theta, eps, tau, *, tour_reps=1, excursion_len=0,
                  cover_depth_cap=None):
    """Budget for a distal pair block: approximant budget plus the demand that
    tour + bridge + spill positions stay below the tau separation allowance."""
    mix = _mix(mu1, mu2, theta)
    m1, parts = approximant_budget(sub, mix, eps, tour_reps=tour_reps,
                                   excursion_len=excursion_len,
                                   cover_depth_cap=cover_depth_cap)
    spill = parts["overhead"] + (len(mix.atoms) + 2) * 64
    m2 = math.ceil(Fraction(2 * spill, Fraction(tau)))
    return max(m1, m2), parts


def _mix(mu1, mu2, theta):
    theta = Fraction(theta)
    if theta == 1:
        return mu1
    if theta == 0:
        return mu2
    return convex_combine([(theta, mu1), (1 - theta, mu2)])


# -- walk assembly ----------------------------------------------------------

class _WalkBuilder:
    """Closed vertex walk as aligned segments: (payload, reps, kind).

    kinds: "tour", "run", "route" carry vertex blocks; "bridge" and "pad"
    carry uniform-length connectors; "insert" carries a raw ambient word.
    Every non-initial vertex segment is preceded by a bridge of the one
    uniform length, so two builds with identical segment plans align
    coordinate by coordinate.
    """

    def __init__(self, sub, bridge_len):
        self.sub = sub
        self.bridge_len = bridge_len
        self.segments = []     # (vertex block | word, reps, kind)
        self.length = 0

    def last_vertex(self):
        for block, _, kind in reversed(self.segments):
            if kind != "insert":
                return block[-1]
        return None

    def add_block(self, block, reps, kind):
        if reps <= 0 or not block:
            return
        last = self.last_vertex()
        if last is not None:
            conn = self.sub.path_exact(last, block[0], self.bridge_len + 1)
            self.segments.append((conn[1:-1], 1, "bridge"))
            self.length += self.bridge_len
        self.segments.append((list(block), reps, kind))
        self.length += len(block) * reps

    def add_insert(self, word, post_path):
        # caller must have routed the walk onto the excursion exit vertex;
        # the insert and its canonical continuation are appended unbridged
        self.segments.append((tuple(word), 1, "insert"))
        self.length += len(word)
        self.segments.append((list(post_path), 1, "route"))
        self.length += len(post_path)

    def close_to_length(self, n):
        first = None
        for block, _, kind in self.segments:
            if kind != "insert":
                first = block[0]
                break
        last = self.last_vertex()
        need = n - self.length
        if need < 0:
            raise ApproximantFailure("walk exceeds requested length")
        if need == 0:
            if not self.sub.matrix[last][first]:
                raise ApproximantFailure("walk does not close")
            return
        path = self.sub.path_exact(last, first, need + 1)
        self.segments.append((path[1:-1], 1, "pad"))
        self.length += need
        if self.length != n:
            raise ApproximantFailure("could not pad walk to exact length")

    def label_segments(self):
        out = []
        for block, reps, kind in self.segments:
            if kind == "insert":
                out.append((tuple(block), reps, kind))
            elif block:
                out.append((self.sub.label_word(block), reps, kind))
        return out

    def runword(self):
        return RunWord([(w, reps) for w, reps, _ in self.label_segments()])


def _resolve_atoms(sub, target, rotate):
    cycles = []
    for weight, cyc in target.atoms:
        word = cyc.to_tuple()
        vc = sub.vertex_cycle_for(word)
        if rotate:
            vc = vc[1:] + vc[:1]
        cycles.append((weight, vc))
    return cycles


def _allocate_runs(cycles, budget):
    """Largest-remainder allocation of run repetitions matching the weights."""
    reps = []
    for w, vc in cycles:
        q = w * budget / len(vc)
        reps.append(max(1, math.floor(q)))
    while sum(k * len(vc) for k, (_, vc) in zip(reps, cycles)) > budget:
        j = max(range(len(reps)), key=lambda i: (reps[i] * len(cycles[i][1]), i))
        if reps[j] <= 1:
            raise ApproximantFailure("weights unrealizable within the run budget")
        reps[j] -= 1
    return reps


def _build_walk(sub, target, n, depth, tour_reps, excursion, rotate, parts):
    wb = _WalkBuilder(sub, parts["bridge_len"])
    if tour_reps > 0:
        wb.add_block(covering_walk_cached(sub, depth), tour_reps, "tour")
    if excursion is not None:
        ex_word, ex_exit, ex_entry = excursion
        pre, post = canonical_context(sub.matrix, ex_exit, ex_entry)
        wb.add_block(list(pre), 1, "route")
        wb.add_insert(ex_word, post)
    cycles = _resolve_atoms(sub, target, rotate)
    pad_target = parts["bridge_len"] + 2 * max(len(vc) for _, vc in cycles)
    reserve = pad_target + (len(cycles) + 1) * parts["bridge_len"]
    run_budget = n - wb.length - reserve
    if run_budget <= 0:
        raise BudgetTooSmall(n, "no room for periodic runs")
    for (weight, vc), k in zip(cycles, _allocate_runs(cycles, run_budget)):
        wb.add_block(vc, k, "run")
    wb.close_to_length(n)
    return wb


def _certify_measure(p, target, eps, trunc, system):
    mu_p = Measure(system, [(Fraction(1), p)])
    value, tail = weakstar_distance(mu_p, target, system=system, truncation=trunc)
    if value + tail >= eps:
        raise ApproximantFailure(
            f"approximant misses tolerance: {value} + {tail} >= {eps}")


def periodic_approximant(sub, target, eps, n, *, require_cover=True,
                         tour_reps=1, excursion=None, cover_depth_cap=None,
                         _rotate=False, _return_segments=False):
    """Periodic word of length exactly n tracking ``target`` within eps.

    Certifies on the output, by exact arithmetic: (a) the truncated weak*
    distance of the orbit measure to the target plus the truncation tail is
    below eps; (b) with ``require_cover``, every subsystem word of the
    eps-covering depth occurs in the cycle (the orbit is eps-dense).
    Raises BudgetTooSmall with the reported budget when n is too short.
    """
    eps = Fraction(eps)
    if len(target.atoms) == 1 and excursion is None and not _rotate:
        cyc = target.atoms[0][1]
        if n % len(cyc) == 0:
            p = RunWord([(cyc, n // len(cyc))])
            ok = True
            if require_cover:
                depth = cover_depth_for(sub.ambient.alphabet_size, eps)
                if cover_depth_cap is not None:
                    depth = min(depth, cover_depth_cap)
                ok = set(sub.language(depth)) <= p.windows(depth, cyclic=True)
            if ok:
                # the orbit itself: both posts hold exactly
                if _return_segments:
                    segs = [(cyc.to_tuple(), n // len(cyc), "run")]
                    return p, segs, {"snap": True}
                return p
    ex_len = (len(excursion[0]) + 1) if excursion else 0
    budget, parts = approximant_budget(sub, target, eps, tour_reps=tour_reps,
                                       excursion_len=ex_len,
                                       require_cover=require_cover,
                                       cover_depth_cap=cover_depth_cap)
    if n < budget:
        raise BudgetTooSmall(budget)
    depth = parts["cover_depth"]
    wb = _build_walk(sub, target, n, depth, tour_reps if require_cover else 0,
                     excursion, _rotate, parts)
    p = wb.runword()
    if len(p) != n:
        raise ApproximantFailure("assembled word has the wrong length")
    _certify_measure(p, target, eps, parts["truncation"], sub.ambient)
    if require_cover:
        missing = set(sub.language(depth)) - p.windows(depth, cyclic=True)
        if missing:
            raise ApproximantFailure(f"approximant misses {len(missing)} covering words")
    if _return_segments:
        return p, wb.label_segments(), parts
    return p


def shift_separation(system, cycle):
    """min over i of d(sigma^i c^inf, sigma^(i+1) c^inf), exact."""
    c = as_word(cycle)
    n = len(c)
    base = system.alphabet_size
    if all(s == c[0] for s in c):
        raise NotDistal("constant cycle is a fixed point")
    best = None
    for i in range(n):
        k = 1
        while c[(i + k - 1) % n] == c[(i + k) % n]:
            k += 1
        d = Fraction(1, base ** k)
        best = d if best is None or d < best else best
    return best


def zeta_of(system, measures):
    """Least shift-separation over all generator cycles of the measures."""
    zeta = None
    for mu in measures:
        for _, cyc in mu.atoms:
            sep = shift_separation(system, cyc.to_tuple())
            zeta = sep if zeta is None or sep < zeta else zeta
    if zeta is None:
        raise NotDistal("no generator cycles")
    return zeta


def _first_diff_depth(w1, w2, j, cap):
    """First k (1-based) with w1^inf and w2^inf differing at offset j; capped."""
    m = len(w1)
    for k in range(1, cap + 1):
        if w1[(j + k - 1) % m] != w2[(j + k - 1) % m]:
            return k
    return cap + 1


def pair_close_bound(base, segs1, segs2, threshold):
    """Exact upper bound on positions where the aligned periodic words sit
    closer than ``threshold`` (as points, coordinate by coordinate).

    Equal-content and overhead segments count wholesale; differing runs are
    generator/shifted-generator pairs whose per-phase first-difference depth
    decides the distance except on a short spill at each run end.
    """
    threshold = Fraction(threshold)
    k_thresh = 0
    while Fraction(1, base ** (k_thresh + 1)) >= threshold:
        k_thresh += 1
    if len(segs1) != len(segs2):
        raise ValueError("misaligned segment plans")
    close = 0
    for (w1, r1, kind1), (w2, r2, kind2) in zip(segs1, segs2):
        if (len(w1), r1) != (len(w2), r2):
            raise ValueError("misaligned segment plans")
        seg_len = len(w1) * r1
        if kind1 != "run" or w1 == w2:
            close += seg_len
            continue
        m = len(w1)
        bad_phases = sum(1 for j in range(m)
                         if _first_diff_depth(w1, w2, j, k_thresh) > k_thresh)
        close += bad_phases * r1 + min(seg_len, k_thresh)
    return close


def distal_pair_block(sub, mu1, mu2, theta, eps, tau, n, *, tour_reps=1,
                      excursion=None, cover_depth_cap=None,
                      _return_segments=False):
    """Two aligned periodic words of length n with (a) both orbit measures
    within eps of theta*mu1 + (1-theta)*mu2, (b) both orbits eps-dense in the
    subsystem, and (c) coordinates closer than zeta - eps on less than a tau
    fraction of [0, n).  Returns (p1, p2, zeta)."""
    eps = Fraction(eps)
    tau = Fraction(tau)
    mix = _mix(mu1, mu2, theta)
    zeta = zeta_of(sub.ambient, [mix])
    if not eps < zeta / 2:
        raise ValueError(f"eps must be below zeta/2 = {zeta / 2}")
    if len(mix.atoms) == 1 and excursion is None:
        cyc = mix.atoms[0][1]
        word = cyc.to_tuple()
        if n % len(word) == 0:
            depth = cover_depth_for(sub.ambient.alphabet_size, eps)
            if cover_depth_cap is not None:
                depth = min(depth, cover_depth_cap)
            p1 = RunWord([(word, n // len(word))])
            rot = word[1:] + word[:1]
            p2 = RunWord([(rot, n // len(word))])
            if set(sub.language(depth)) <= p1.windows(depth, cyclic=True):
                segs1 = [(word, n // len(word), "run")]
                segs2 = [(rot, n // len(word), "run")]
                close = pair_close_bound(sub.ambient.alphabet_size, segs1, segs2,
                                         zeta - eps)
                if Fraction(close, n) < tau:
                    if _return_segments:
                        return p1, p2, zeta, segs1, segs2, {"snap": True}
                    return p1, p2, zeta
    ex_len = (len(excursion[0]) + 1) if excursion else 0
    budget, parts = distal_budget(sub, mu1, mu2, theta, eps, tau,
                                  tour_reps=tour_reps, excursion_len=ex_len,
                                  cover_depth_cap=cover_depth_cap)
    if n < budget:
        raise BudgetTooSmall(budget)
    depth = parts["cover_depth"]
    wb1 = _build_walk(sub, mix, n, depth, tour_reps, excursion, False, parts)
    wb2 = _build_walk(sub, mix, n, depth, tour_reps, excursion, True, parts)
    segs1 = wb1.label_segments()
    segs2 = wb2.label_segments()
    p1 = RunWord([(w, r) for w, r, _ in segs1])
    p2 = RunWord([(w, r) for w, r, _ in segs2])
    for p in (p1, p2):
        _certify_measure(p, mix, eps, parts["truncation"], sub.ambient)
        missing = set(sub.language(depth)) - p.windows(depth, cyclic=True)
        if missing:
            raise ApproximantFailure("distal block misses covering words")
    close = pair_close_bound(sub.ambient.alphabet_size, segs1, segs2, zeta - eps)
    if not Fraction(close, n) < tau:
        raise ApproximantFailure(f"separation budget violated: {close}/{n} >= {tau}")
    if _return_segments:
        return p1, p2, zeta, segs1, segs2, parts
    return p1, p2, zeta


# -- rose subsystems (elementary dense subsystems) ---------------------------

def rose_subsystem(ambient, cycle_words, junctions=None, provenance="rose"):
    """SFT of free concatenations of the given cycles: each cycle is a petal,
    petal ends connect to petal starts (all pairs unless ``junctions`` lists
    the allowed (from_cycle, to_cycle) pairs)."""
    cycle_words = [as_word(c) for c in cycle_words]
    labels = []
    matrix_size = sum(len(c) for c in cycle_words)
    matrix = [[0] * matrix_size for _ in range(matrix_size)]
    starts = []
    pos = 0
    for c in cycle_words:
        starts.append(pos)
        labels.extend(c)
        for i in range(len(c) - 1):
            matrix[pos + i][pos + i + 1] = 1
        pos += len(c)
    ends = [s + len(c) - 1 for s, c in zip(starts, cycle_words)]
    if junctions is None:
        junctions = [(i, j) for i in range(len(cycle_words))
                     for j in range(len(cycle_words))]
    for i, j in junctions:
        matrix[ends[i]][starts[j]] = 1
    petals = tuple(tuple(range(s, s + len(c))) for s, c in zip(starts, cycle_words))
    return Subsystem(ambient, tuple(labels), tuple(tuple(r) for r in matrix),
                     provenance=provenance, petals=petals)


def single_cycle_subsystem(ambient, cycle_word, provenance="orbit"):
    return rose_subsystem(ambient, [cycle_word], junctions=[(0, 0)],
                          provenance=provenance)


def rose_grid_check(rose, mu1, mu2, eps, points=33):
    """Check every grid mixture of the two petal targets is within eps of a
    periodic measure of the rose: the declared finite-grid Hausdorff check."""
    eps = Fraction(eps)
    w1 = rose.label_word(rose.petals[0])
    w2 = rose.label_word(rose.petals[1])
    trunc = _truncation_for(eps)
    denom = points - 1
    unit = len(w1) * len(w2)
    k = max(1, math.ceil(Fraction(8 * (trunc + 1), eps * denom * unit)))
    for j in range(points):
        x = j * k * len(w2)
        y = (denom - j) * k * len(w1)
        cyc = RunWord([(w1, x), (w2, y)])
        mix = _mix(mu1, mu2, Fraction(j, denom))
        mu_c = Measure(rose.ambient, [(Fraction(1), cyc)])
        value, tail = weakstar_distance(mu_c, mix, system=rose.ambient,
                                        truncation=trunc)
        if value + tail >= eps:
            return False, j
    return True, None


def elementary_subsystem(mu1, mu2, eps, ambient):
    """Rose SFT on two coprime cycles realizing the two targets within eps.

    Snaps to the targets' own cycles when both are single periodic orbits
    with coprime primitive periods; otherwise builds periodic approximants of
    consecutive lengths n, n+1 in the ambient system and joins them.
    Certifies: primitivity, fixed-point freeness, the 33-point grid check,
    and a block of every length from n*n on (coin representability).
    """
    eps = Fraction(eps)
    amb = ambient_subsystem(ambient)
    snap = None
    if len(mu1.atoms) == 1 and len(mu2.atoms) == 1:
        c1 = mu1.atoms[0][1].to_tuple()
        c2 = mu2.atoms[0][1].to_tuple()
        from .shiftspace import primitive_period
        if (math.gcd(len(c1), len(c2)) == 1
                and primitive_period(c1) == len(c1)
                and primitive_period(c2) == len(c2)):
            snap = (c1, c2)
    if snap is None:
        b1, _ = approximant_budget(amb, mu1, eps / 2, require_cover=False)
        b2, _ = approximant_budget(amb, mu2, eps / 2, require_cover=False)
        n = max(b1, b2) + 1
        p1 = periodic_approximant(amb, mu1, eps / 2, n, require_cover=False)
        p2 = periodic_approximant(amb, mu2, eps / 2, n + 1, require_cover=False)
        snap = (p1.to_tuple(), p2.to_tuple())
    c1, c2 = snap
    rose = rose_subsystem(ambient, [c1, c2],
                          provenance=f"elementary eps={eps}")
    ok, idx = is_primitive(rose.matrix)
    if not ok:
        raise ApproximantFailure("rose is not primitive")
    if not rose.fixed_point_free:
        raise ApproximantFailure("rose contains a fixed point")
    good, bad_j = rose_grid_check(rose, mu1, mu2, eps)
    if not good:
        raise ApproximantFailure(f"grid check failed at grid point {bad_j}")
    lam1 = single_cycle_subsystem(ambient, c1, provenance="petal 1")
    lam2 = single_cycle_subsystem(ambient, c2, provenance="petal 2")
    return rose, lam1, lam2


def block_lengths_available(rose, upto):
    """Lengths representable as nonnegative petal-length combinations."""
    lens = [len(p) for p in rose.petals]
    reach = [False] * (upto + 1)
    reach[0] = True
    for k in range(1, upto + 1):
        reach[k] = any(k >= l and reach[k - l] for l in lens)
    return reach


# -- Theta enlargement --------------------------------------------------------

def find_external_word(lam, ambient, max_len=8):
    """Shortest ambient-admissible word outside the subsystem language, with
    deterministic exit/entry vertices making the insertion admissible."""
    from .shiftspace import language as ambient_language
    for m in range(1, max_len + 1):
        for w in ambient_language(ambient, m):
            if lam.word_admissible(w):
                continue
            for e in range(lam.n_vertices):
                if not _ambient_edge(ambient, lam.labels[e], w[0]):
                    continue
                for s in range(lam.n_vertices):
                    if _ambient_edge(ambient, w[-1], lam.labels[s]):
                        return tuple(w), e, s
    raise NoExternalWord("no ambient word escapes the subsystem language")


def embed_theta(lam, ambient, insert=None, stages=5, max_cover_depth=4):
    """Theta subsystem strictly containing lam with the same invariant
    measures, plus the witness point whose omega-limit set it is.

    The witness tours lam at growing covering depth and separates successive
    copies of the external insert by gaps growing per the recorded rule, so
    insert visits have Banach upper density zero along the orbit.
    """
    if insert is None:
        insert, exit_v, entry_v = find_external_word(lam, ambient)
    else:
        insert, exit_v, entry_v = insert
        if lam.word_admissible(insert):
            raise NoExternalWord("insert word lies inside the subsystem language")
    pre, post = canonical_context(lam.matrix, exit_v, entry_v)
    theta = Subsystem(ambient, lam.labels, lam.matrix,
                      provenance=f"theta over ({lam.provenance})",
                      petals=lam.petals,
                      theta=ThetaInfo(insert, exit_v, entry_v, pre, post))
    runs = []
    total = 0
    last = None
    for i in range(1, stages + 1):
        depth = min(i, max_cover_depth)
        walk = covering_walk_cached(lam, depth)
        gap = (2 ** i) * max(total, len(walk))
        blocks = []
        if last is not None:
            conn = lam.path_exact(last, pre[0], lam.n_vertices + 1)
            blocks.append((lam.label_word(conn[1:]), 1))
            blocks.append((lam.label_word(pre[1:]) if len(pre) > 1 else (), 1))
            blocks.append((insert, 1))
            blocks.append((lam.label_word(post), 1))
            conn2 = _shortest_path(lam.matrix, post[-1], walk[0])
            blocks.append((lam.label_word(conn2[1:-1]), 1))
        reps = max(1, -(-gap // len(walk)))
        blocks.append((lam.label_word(walk), reps))
        for b in blocks:
            if b[0]:
                runs.append(b)
                total += len(b[0]) * b[1]
        last = walk[-1]
    head = RunWord(runs)
    witness = PointProgram(ambient, head, lam.label_word(covering_walk_cached(lam, 1)),
                           meta={"kind": "theta-witness", "insert": insert})
    return theta, witness
