"""Finite words over integer alphabets, plain and run-length encoded.

Words are tuples of small nonnegative ints.  ``RunWord`` stores a long word
as consecutive (block, repeat) runs so that constructions whose proof budgets
force astronomical lengths stay queryable: symbol lookup, exact occurrence
counts of depth-m windows, and prefix materialization all work by arithmetic
on the runs, never by expanding the word.
"""

from __future__ import annotations

from bisect import bisect_right

import numpy as np


def as_word(w):
    """Coerce a str / iterable / RunWord into a plain symbol tuple."""
    if isinstance(w, RunWord):
        return w.to_tuple()
    if isinstance(w, tuple) and all(isinstance(s, int) for s in w):
        return w
    if isinstance(w, str):
        return tuple(int(ch) for ch in w)
    return tuple(int(s) for s in w)


def word_str(w):
    """Digit-string rendering; only valid for alphabets of size <= 10."""
    w = as_word(w)
    if any(s > 9 for s in w):
        return ".".join(str(s) for s in w)
    return "".join(str(s) for s in w)


def parse_word(text):
    """Inverse of word_str."""
    text = text.strip()
    if "." in text:
        return tuple(int(p) for p in text.split("."))
    return tuple(int(ch) for ch in text)


def rotations(w):
    w = as_word(w)
    return [w[i:] + w[:i] for i in range(len(w))]


def is_primitive_word(w):
    """True iff w is not a proper power of a shorter word."""
    w = as_word(w)
    n = len(w)
    for d in range(1, n):
        if n % d == 0 and w == (w[:d] * (n // d)):
            return False
    return True


def cyclic_window(w, start, m):
    """Length-m window of the periodic sequence w^inf starting at ``start``."""
    w = as_word(w)
    n = len(w)
    return tuple(w[(start + j) % n] for j in range(m))


class RunWord:
    """A finite word stored as (block, repeat) runs.

    A block is a plain symbol tuple, or (for whole-word repetitions too
    large to inline) another RunWord; one nesting level suffices for the
    constructions here.  Small repeated RunWords are inlined.
    """

    __slots__ = ("runs", "length", "_starts")

    _INLINE_CAP = 100_000

    def __init__(self, runs):
        flat = []
        for block, count in runs:
            count = int(count)
            if count <= 0:
                continue
            if isinstance(block, RunWord):
                if len(block) == 0:
                    continue
                if count == 1:
                    flat.extend(block.runs)
                elif count * len(block.runs) <= self._INLINE_CAP:
                    flat.extend(list(block.runs) * count)
                else:
                    flat.append((block, count))
                continue
            block = as_word(block)
            if block:
                flat.append((block, count))
        merged = []
        for block, count in flat:
            if merged and merged[-1][0] == block:
                merged[-1] = (block, merged[-1][1] + count)
            else:
                merged.append((block, count))
        self.runs = tuple((b, c) for b, c in merged)
        starts = [0]
        for block, count in self.runs:
            starts.append(starts[-1] + len(block) * count)
        self.length = starts[-1]
        self._starts = starts

    @classmethod
    def from_word(cls, w):
        return cls([(as_word(w), 1)])

    def __len__(self):
        return self.length

    def __eq__(self, other):
        if isinstance(other, RunWord):
            return self.runs == other.runs
        return NotImplemented

    def __hash__(self):
        return hash(self.runs)

    def __repr__(self):
        inner = ",".join(f"{word_str(b)}x{c}" for b, c in self.runs[:4])
        if len(self.runs) > 4:
            inner += ",..."
        return f"RunWord(len={self.length},{inner})"

    def symbol(self, i):
        """Symbol at position i (0-based); i may be a big int."""
        if not 0 <= i < self.length:
            raise IndexError(i)
        k = bisect_right(self._starts, i) - 1
        block, _ = self.runs[k]
        off = (i - self._starts[k]) % len(block)
        return block.symbol(off) if isinstance(block, RunWord) else block[off]

    def segment_tuple(self, start, length):
        """Materialize w[start:start+length] as a tuple (length must be small)."""
        return tuple(self.symbol(start + j) for j in range(length))

    def to_tuple(self):
        if self.length > 10**7:
            raise ValueError("word too long to materialize")
        out = []
        for block, count in self.runs:
            piece = block.to_tuple() if isinstance(block, RunWord) else block
            out.extend(piece * count)
        return tuple(out)

    def to_array(self, n=None):
        """First n symbols as a uint8 numpy array (alphabet must fit)."""
        n = self.length if n is None else min(n, self.length)
        parts = []
        got = 0
        for block, count in self.runs:
            if got >= n:
                break
            arr = block.to_array() if isinstance(block, RunWord) \
                else np.array(block, dtype=np.uint8)
            need = n - got
            reps = min(count, -(-need // len(arr)))
            piece = np.tile(arr, reps)[:need]
            parts.append(piece)
            got += len(piece)
        if not parts:
            return np.zeros(0, dtype=np.uint8)
        return np.concatenate(parts)

    def window_counts(self, m, cyclic=True):
        """Exact occurrence counts of every length-m window.

        Window at position p reads symbols p..p+m-1; with ``cyclic`` the word
        wraps around, otherwise starts stop at length-m.  Runs contribute
        their interior windows by phase arithmetic; the O(m) starts near each
        run boundary are materialized explicitly.
        """
        if m <= 0:
            raise ValueError("window depth must be positive")
        L = self.length
        counts = {}
        if L == 0 or (not cyclic and L < m):
            return counts

        def bump(word, k):
            counts[word] = counts.get(word, 0) + k

        def window_at(p):
            if cyclic:
                return tuple(self.symbol((p + j) % L) for j in range(m))
            return tuple(self.symbol(p + j) for j in range(m))

        last_start = L - 1 if cyclic else L - m
        for k, (block, count) in enumerate(self.runs):
            if isinstance(block, RunWord):
                raise ValueError("window counts need inlined runs; "
                                 "this word is too deeply repeated")
            S = self._starts[k]
            run_len = len(block) * count
            interior = run_len - m + 1  # starts whose window stays in the run
            if interior > 0:
                q, r = divmod(interior, len(block))
                for phase in range(len(block)):
                    n_here = q + (1 if phase < r else 0)
                    if n_here and S + phase <= last_start:
                        bump(cyclic_window(block, phase, m), n_here)
                boundary_from = S + interior
            else:
                boundary_from = S
            for p in range(boundary_from, S + run_len):
                if p <= last_start:
                    bump(window_at(p), 1)
        return counts

    def count(self, u, cyclic=True):
        u = as_word(u)
        return self.window_counts(len(u), cyclic=cyclic).get(u, 0)

    def windows(self, m, cyclic=True):
        return set(self.window_counts(m, cyclic=cyclic))


def concat(*parts):
    """RunWord concatenation of words / RunWords."""
    runs = []
    for p in parts:
        if isinstance(p, RunWord):
            runs.extend(p.runs)
        else:
            w = as_word(p)
            if w:
                runs.append((w, 1))
    return RunWord(runs)
