"""Dynamic array of colours with positional updates and range
alpha-majority queries.

Positions map to strictly increasing integer labels drawn from a 2^62
universe via density-threshold list labeling: an insert takes the
midpoint of its neighbour gap, and when the gap is full the smallest
enclosing aligned window still under its density threshold is re-spread
evenly. Thresholds fall geometrically with window level and bottom out
at one half, so the top-level re-spread doubles as the global relabel.
Every moved key is replayed into the integer majority index as a delete
plus an insert, and the replayed move count is the exported cost
measure.
"""

from __future__ import annotations

from fractions import Fraction

from .tree import MajorityIndex

BITS = 62
UNIVERSE = 1 << BITS

# Per-level density ceilings. The ratio per level must leave each window
# real absorption headroom over its children, else hot spots respread on
# every insert; 93/100 per level, floored at 1/2, measured best against
# a repeated-midpoint workload.
_TAU = [max(Fraction(1, 2), Fraction(93, 100) ** j) for j in range(BITS + 1)]
_FLOOR_LEVEL = 4


def _window_ok(count: int, level: int) -> bool:
    tau = _TAU[level]
    return count * tau.denominator < tau.numerator * (1 << level)


class DynamicColourArray:
    """Array of colours indexed from 1, backed by an integer majority
    index keyed by order-maintenance labels."""

    def __init__(self, alpha):
        self.engine = MajorityIndex(alpha, "int")
        self._labels: list[int] = []
        self._colours: list = []
        self.moves = 0  # keys replayed through the engine by relabels
        self.ops = 0

    def __len__(self) -> int:
        return len(self._labels)

    @property
    def alpha(self):
        return self.engine.cfg.alpha

    # ---- label management ----

    def _respread(self, lo: int, level: int, s: int, e: int) -> None:
        """Evenly relabel positions s..e-1 (the new slot among them,
        already spliced into the lists) across [lo, lo + 2^level)."""
        span = 1 << level
        k = e - s
        assert k < span
        for t in range(s, e):
            old = self._labels[t]
            if old is not None:
                self.engine.delete(old)
        for t in range(s, e):
            fresh = lo + ((t - s + 1) * span) // (k + 1)
            self._labels[t] = fresh
            self.engine.insert(fresh, self._colours[t])
        self.moves += k - 1  # the new slot's first labeling is not a move

    def _assign(self, idx: int, colour) -> None:
        """Label the already-spliced slot at list index idx."""
        left = self._labels[idx - 1] if idx > 0 else -1
        right = self._labels[idx + 1] if idx + 1 < len(self._labels) else UNIVERSE
        if right - left >= 2:
            label = left + (right - left) // 2
            self._labels[idx] = label
            self.engine.insert(label, colour)
            return
        # crowded: find the smallest aligned window around the anchor
        # that stays under its density threshold once the new slot joins
        anchor = left if idx > 0 else right
        labels = self._labels
        n = len(labels)
        for level in range(_FLOOR_LEVEL, BITS + 1):
            span = 1 << level
            lo = (anchor >> level) << level
            hi = lo + span
            s = idx
            while s > 0 and labels[s - 1] is not None and labels[s - 1] >= lo:
                s -= 1
            e = idx + 1
            while e < n and labels[e] is not None and labels[e] < hi:
                e += 1
            if _window_ok(e - s, level):
                self._respread(lo, level, s, e)
                return
        raise OverflowError("label universe exhausted")

    # ---- operations ----

    def _check_pos(self, i: int, hi: int) -> None:
        if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= hi:
            raise IndexError(f"position {i} out of range [1, {hi}]")

    def insert(self, i: int, colour) -> None:
        """Insert colour between positions i-1 and i (1 <= i <= n+1)."""
        self._check_pos(i, len(self._labels) + 1)
        self._labels.insert(i - 1, None)
        self._colours.insert(i - 1, colour)
        self._assign(i - 1, colour)
        self.ops += 1

    def append(self, colour) -> None:
        self.insert(len(self._labels) + 1, colour)

    def delete(self, i: int) -> None:
        """Remove position i; later positions shift left. No relabels."""
        self._check_pos(i, len(self._labels))
        label = self._labels.pop(i - 1)
        self._colours.pop(i - 1)
        self.engine.delete(label)
        self.ops += 1

    def modify(self, i: int, colour) -> None:
        """Replace the colour at position i, keeping its label."""
        self._check_pos(i, len(self._labels))
        label = self._labels[i - 1]
        self.engine.delete(label)
        self.engine.insert(label, colour)
        self._colours[i - 1] = colour
        self.ops += 1

    def get(self, i: int):
        self._check_pos(i, len(self._labels))
        return self._colours[i - 1]

    def query(self, i: int, j: int) -> set:
        return set(self.query_counts(i, j))

    def query_counts(self, i: int, j: int) -> dict:
        """Strict alpha-majorities of A[i..j] with exact counts."""
        self._check_pos(i, len(self._labels))
        self._check_pos(j, len(self._labels))
        if i > j:
            raise IndexError(f"empty position range [{i}, {j}]")
        return self.engine.query_counts(self._labels[i - 1], self._labels[j - 1])

    # ---- audits ----

    def audit(self, deep: bool = False) -> None:
        labels = self._labels
        assert len(labels) == len(self._colours) == len(self.engine)
        for t in range(1, len(labels)):
            assert labels[t - 1] < labels[t], f"label order broken at {t}"
        if labels:
            assert 0 <= labels[0] and labels[-1] < UNIVERSE
            got = sorted(lf.coord for lf in self.engine.leaves())
            assert got == labels, "engine keys drifted from labels"
            for lf, want in zip(self.engine.leaves(), self._colours):
                assert self.engine.registry.label_of(lf.colour) == want
        self.engine.audit_tree(deep=deep)
