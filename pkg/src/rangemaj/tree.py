"""Dynamic range majority index over one-dimensional point sets.

Points are (coordinate, colour) pairs with pairwise-distinct
coordinates. The index answers range queries for every colour occupying
strictly more than an alpha fraction of the points in the range, under
arbitrary interleavings of inserts and deletes.

Layout: a weight-balanced B-tree with branching parameter 8 and one
coordinate per leaf. Heavy nodes carry a short list of their most
frequent colours with counts, rebuilt lazily on a staleness budget;
light nodes are scanned directly. A query snaps its endpoints to stored
coordinates, splits the range into canonical nodes, accumulates
candidate counts from the top few height levels only, filters at a
quarter of the reporting threshold, and verifies survivors exactly
against per-colour counting structures.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from fractions import Fraction

import numpy as np

from .backend import counted_set_from_sorted, make_counted_set
from .errors import DuplicateKeyError
from .navigation import findtop
from .params import (
    BRANCH,
    AlphaConfig,
    MAX_DEGREE,
    MIN_DEGREE,
    rebuild_threshold,
)
from .registry import ColourRegistry, ScratchCounters

INT_BOUND = 1 << 62


def group_by_height(nodes):
    """Canonical nodes grouped by height, highest class first."""
    by_h: dict = {}
    for n in nodes:
        by_h.setdefault(n.height, []).append(n)
    return [(h, by_h[h]) for h in sorted(by_h, reverse=True)]


class _Leaf:
    __slots__ = ("coord", "colour", "parent", "anc", "min_leaf", "max_leaf", "alive")

    height = 0
    weight = 1
    children = None
    cand = None

    def __init__(self, coord, colour):
        self.coord = coord
        self.colour = colour
        self.parent = None
        self.anc = None
        self.min_leaf = self
        self.max_leaf = self
        self.alive = True


class _Node:
    __slots__ = (
        "children",
        "parent",
        "anc",
        "height",
        "weight",
        "min_leaf",
        "max_leaf",
        "cand",
        "staleness",
        "ell_at_rebuild",
        "rebuild_at",
        "rebuild_serial",
        "alive",
    )

    def __init__(self, height):
        self.children = []
        self.parent = None
        self.anc = None
        self.height = height
        self.weight = 0
        self.min_leaf = None
        self.max_leaf = None
        self.cand = None
        self.staleness = 0
        self.ell_at_rebuild = 0
        self.rebuild_at = 0
        self.rebuild_serial = 0
        self.alive = True


class MajorityIndex:
    """Dynamic 1-D range alpha-majority index.

    key_kind selects the coordinate domain: "int" (64-bit integers, uses
    the stride-jump top-level discovery), "float" (finite doubles), or
    "object" (any totally ordered Python keys, e.g. tuples).
    """

    def __init__(self, alpha, key_kind="int", registry=None, manage_registry=True):
        self.cfg = AlphaConfig.from_alpha(alpha)
        if key_kind not in ("int", "float", "object"):
            raise ValueError(f"unknown key kind {key_kind!r}")
        self.key_kind = key_kind
        self._ap = self.cfg.alpha.numerator
        self._aq = self.cfg.alpha.denominator
        self.prune_cutoff = 2 * self.cfg.list_size
        self.registry = registry if registry is not None else ColourRegistry()
        self._manage_registry = manage_registry
        self.scratch = ScratchCounters(self.registry)
        self.F = make_counted_set(key_kind)
        self.per_colour: dict = {}
        self.root = None
        self.capture_debug = False
        self.last_query_debug = None
        self.stats = {
            "lca_calls": 0,
            "last_findtop_lca_calls": 0,
            "rebuild_leaf_work": 0,
            "list_rebuilds": 0,
            "splits": 0,
            "merges": 0,
            "shares": 0,
            "queries": 0,
            "pruned_leaf_visits": 0,
        }

    # ---- coordinate validation ----

    def _coord(self, x):
        if self.key_kind == "int":
            if isinstance(x, bool) or not isinstance(x, int):
                raise ValueError(f"integer coordinate required, got {x!r}")
            if not -INT_BOUND <= x <= INT_BOUND:
                raise ValueError(f"coordinate {x} outside +/-2^62")
            return x
        if self.key_kind == "float":
            x = float(x)
            if not math.isfinite(x):
                raise ValueError(f"finite coordinate required, got {x!r}")
            return x
        return x

    def _query_bound(self, x, which):
        # query endpoints tolerate over-wide ranges in the numeric kinds
        if self.key_kind == "int":
            if isinstance(x, bool) or not isinstance(x, int):
                raise ValueError(f"integer bound required, got {x!r}")
            return max(-INT_BOUND, x) if which == "lo" else min(INT_BOUND, x)
        if self.key_kind == "float":
            x = float(x)
            if math.isnan(x):
                raise ValueError("NaN query bound")
            return x
        return x

    # ---- basic accessors ----

    def __len__(self) -> int:
        return len(self.F)

    @property
    def height(self):
        return self.root.height if self.root is not None else None

    @property
    def alpha(self) -> Fraction:
        return self.cfg.alpha

    # ---- bulk construction ----

    @classmethod
    def build(cls, points, alpha, key_kind="int", registry=None, manage_registry=True):
        self = cls(alpha, key_kind, registry, manage_registry)
        pts = sorted((self._coord(c), lab) for c, lab in points)
        for i in range(1, len(pts)):
            if pts[i - 1][0] == pts[i][0]:
                raise DuplicateKeyError(pts[i][0])
        if not pts:
            return self

        leaves = []
        per_cid: dict = {}
        for coord, lab in pts:
            cid = self.registry.intern(lab)
            leaves.append(_Leaf(coord, cid))
            per_cid.setdefault(cid, []).append(coord)
        self.F.load_sorted([c for c, _ in pts])
        for cid, coords in per_cid.items():
            self.per_colour[cid] = counted_set_from_sorted(coords, self.key_kind)

        ids_arr = np.array([lf.colour for lf in leaves], dtype=np.int64)
        level = leaves
        spans = [(i, i + 1) for i in range(len(leaves))]
        h = 0
        while len(level) > 1:
            h += 1
            target = BRANCH**h
            group_lists: list[list] = []
            cur: list = []
            acc = 0
            for node in level:
                cur.append(node)
                acc += node.weight
                if acc >= target:
                    group_lists.append(cur)
                    cur = []
                    acc = 0
            if cur:
                if group_lists and 2 * acc < target:
                    group_lists[-1].extend(cur)
                else:
                    group_lists.append(cur)

            new_level = []
            new_spans = []
            pos = 0
            for kids in group_lists:
                node = _Node(h)
                node.children = kids
                w = 0
                for c in kids:
                    c.parent = node
                    w += c.weight
                node.weight = w
                node.min_leaf = kids[0].min_leaf
                node.max_leaf = kids[-1].max_leaf
                i0 = spans[pos][0]
                i1 = spans[pos + len(kids) - 1][1]
                pos += len(kids)
                if w > self.prune_cutoff:
                    self._bulk_list(node, ids_arr[i0:i1])
                new_level.append(node)
                new_spans.append((i0, i1))
            level = new_level
            spans = new_spans

        self.root = level[0]
        self.root.parent = None
        return self

    def _bulk_list(self, node, seg) -> None:
        vals, cnts = np.unique(seg, return_counts=True)
        sel = np.lexsort((vals, -cnts))[: self.cfg.list_size]
        node.cand = {int(vals[s]): int(cnts[s]) for s in sel}
        node.staleness = 0
        node.ell_at_rebuild = node.weight
        node.rebuild_at = rebuild_threshold(node.weight, self.cfg.beta)

    # ---- candidate lists ----

    def rebuild_list(self, v) -> None:
        """Recompute C(v) exactly from the leaves of v's subtree."""
        counts: Counter = Counter()
        stack = [v]
        while stack:
            u = stack.pop()
            if u.height:
                stack.extend(u.children)
            else:
                counts[u.colour] += 1
        top = heapq.nsmallest(
            self.cfg.list_size, counts.items(), key=lambda kv: (-kv[1], kv[0])
        )
        v.cand = dict(top)
        v.staleness = 0
        v.ell_at_rebuild = v.weight
        v.rebuild_at = rebuild_threshold(v.weight, self.cfg.beta)
        v.rebuild_serial += 1
        self.stats["list_rebuilds"] += 1
        self.stats["rebuild_leaf_work"] += v.weight

    def _upkeep_insert(self, v, cid) -> None:
        # every update into the subtree ages the list; tracked colours
        # additionally keep their exact count
        if v.cand is None:
            if v.weight > self.prune_cutoff:
                self.rebuild_list(v)
            return
        c = v.cand.get(cid)
        if c is not None:
            v.cand[cid] = c + 1
        v.staleness += 1
        if v.staleness >= v.rebuild_at:
            self.rebuild_list(v)

    def _upkeep_delete(self, v, cid) -> None:
        if v.cand is None:
            return
        if v.weight <= self.prune_cutoff:
            v.cand = None
            return
        c = v.cand.get(cid)
        if c is not None:
            # exact while tracked; dropping at zero loses nothing
            if c == 1:
                del v.cand[cid]
            else:
                v.cand[cid] = c - 1
        v.staleness += 1
        if v.staleness >= v.rebuild_at:
            self.rebuild_list(v)

    # ---- rebalancing ----

    def _make_internal(self, kids, height):
        node = _Node(height)
        node.children = kids
        w = 0
        for c in kids:
            c.parent = node
            w += c.weight
        node.weight = w
        node.min_leaf = kids[0].min_leaf
        node.max_leaf = kids[-1].max_leaf
        if w > self.prune_cutoff:
            self.rebuild_list(node)
        return node

    @staticmethod
    def _halve(kids):
        total = sum(c.weight for c in kids)
        acc = 0
        for i, c in enumerate(kids[:-1]):
            acc += c.weight
            if 2 * acc >= total:
                return kids[: i + 1], kids[i + 1 :]
        return kids[:-1], kids[-1:]

    def _split(self, v) -> None:
        left_kids, right_kids = self._halve(v.children)
        a = self._make_internal(left_kids, v.height)
        b = self._make_internal(right_kids, v.height)
        parent = v.parent
        if parent is None:
            root = _Node(v.height + 1)
            root.children = [a, b]
            a.parent = b.parent = root
            root.weight = a.weight + b.weight
            root.min_leaf = a.min_leaf
            root.max_leaf = b.max_leaf
            if root.weight > self.prune_cutoff:
                self.rebuild_list(root)
            self.root = root
        else:
            i = parent.children.index(v)
            parent.children[i : i + 1] = [a, b]
            a.parent = b.parent = parent
        v.alive = False
        self.stats["splits"] += 1

    def _fix_underflow(self, v) -> None:
        parent = v.parent
        sibs = parent.children
        i = sibs.index(v)
        j = i - 1 if i > 0 else i + 1
        sib = sibs[j]
        lo, hi = (j, i) if j < i else (i, j)
        kids = sibs[lo].children + sibs[hi].children
        combined = v.weight + sib.weight
        h = v.height
        if 2 * combined <= 3 * BRANCH**h:
            node = self._make_internal(kids, h)
            node.parent = parent
            sibs[lo : hi + 1] = [node]
            self.stats["merges"] += 1
        else:
            left_kids, right_kids = self._halve(kids)
            a = self._make_internal(left_kids, h)
            b = self._make_internal(right_kids, h)
            a.parent = b.parent = parent
            sibs[lo : hi + 1] = [a, b]
            self.stats["shares"] += 1
        v.alive = False
        sib.alive = False

    # ---- updates ----

    def insert(self, x, colour) -> None:
        x = self._coord(x)
        if self.F.count_range(x, x):
            raise DuplicateKeyError(x)
        cid = self.registry.intern(colour)
        self.F.insert(x)
        pc = self.per_colour.get(cid)
        if pc is None:
            pc = make_counted_set(self.key_kind)
            self.per_colour[cid] = pc
        pc.insert(x)

        leaf = _Leaf(x, cid)
        if self.root is None:
            self.root = leaf
            return
        path = []
        cur = self.root
        while cur.height:
            path.append(cur)
            nxt = None
            for c in cur.children:
                if c.max_leaf.coord >= x:
                    nxt = c
                    break
            cur = nxt if nxt is not None else cur.children[-1]

        if not path:
            node = _Node(1)
            first, second = (cur, leaf) if cur.coord < x else (leaf, cur)
            node.children = [first, second]
            first.parent = second.parent = node
            node.weight = 2
            node.min_leaf = first
            node.max_leaf = second
            self.root = node
            return

        parent = path[-1]
        pos = parent.children.index(cur)
        if x < cur.coord:
            parent.children.insert(pos, leaf)
        else:
            parent.children.insert(pos + 1, leaf)
        leaf.parent = parent

        for v in reversed(path):
            v.weight += 1
            v.min_leaf = v.children[0].min_leaf
            v.max_leaf = v.children[-1].max_leaf
            if v.weight > 2 * BRANCH**v.height:
                self._split(v)
            else:
                self._upkeep_insert(v, cid)

    def delete(self, x) -> None:
        x = self._coord(x)
        if self.root is None or not self.F.count_range(x, x):
            raise KeyError(x)
        path = []
        cur = self.root
        while cur.height:
            path.append(cur)
            for c in cur.children:
                if c.max_leaf.coord >= x:
                    cur = c
                    break
        cid = cur.colour
        self.F.delete(x)
        pc = self.per_colour[cid]
        pc.delete(x)
        if not len(pc):
            del self.per_colour[cid]
        self.registry.release(cid)
        cur.alive = False

        if not path:
            self.root = None
        else:
            path[-1].children.remove(cur)
            for v in reversed(path):
                v.weight -= 1
                v.min_leaf = v.children[0].min_leaf
                v.max_leaf = v.children[-1].max_leaf
                if v.parent is None:
                    if len(v.children) == 1:
                        child = v.children[0]
                        child.parent = None
                        v.alive = False
                        self.root = child
                    else:
                        self._upkeep_delete(v, cid)
                elif 2 * v.weight < BRANCH**v.height:
                    self._fix_underflow(v)
                else:
                    self._upkeep_delete(v, cid)

        if self._manage_registry:
            mapping = self.registry.maybe_remap(len(self.F))
            if mapping:
                self._apply_remap(mapping)

    def _apply_remap(self, mapping) -> None:
        self.per_colour = {mapping[c]: pc for c, pc in self.per_colour.items()}
        if self.root is not None:
            stack = [self.root]
            while stack:
                u = stack.pop()
                if u.height:
                    if u.cand is not None:
                        # stale entries of fully-deleted colours are dropped
                        u.cand = {
                            mapping[c]: n for c, n in u.cand.items() if c in mapping
                        }
                    stack.extend(u.children)
                else:
                    u.colour = mapping[u.colour]
        self.scratch.resize()

    # ---- range machinery ----

    def snap(self, lo, hi):
        """Nearest stored coordinates inside [lo, hi], or None if empty."""
        if self.root is None:
            return None
        a = self.F.successor(lo)
        if a is None or a > hi:
            return None
        return a, self.F.predecessor(hi)

    def _cover_node(self, a, b):
        # deepest node whose range contains the snapped range [a, b]
        v = self.root
        while v.height:
            down = None
            for c in v.children:
                if c.max_leaf.coord >= a:
                    if c.max_leaf.coord >= b:
                        down = c
                    break
            if down is None:
                return v
            v = down
        return v

    def _find_leaf(self, x):
        v = self.root
        while v.height:
            for c in v.children:
                if c.max_leaf.coord >= x:
                    v = c
                    break
        return v

    def _decompose_all(self, a, b):
        root = self.root
        if root.height == 0:
            return [root] if a <= root.coord <= b else []
        if a <= root.min_leaf.coord and root.max_leaf.coord <= b:
            return [root]
        out = []
        stack = [root]
        while stack:
            v = stack.pop()
            for c in v.children:
                cmin = c.min_leaf.coord
                cmax = c.max_leaf.coord
                if cmax < a or cmin > b:
                    continue
                if a <= cmin and cmax <= b:
                    out.append(c)
                elif c.height:
                    stack.append(c)
        return out

    def decompose(self, a, b):
        """Canonical set of the snapped range [a, b]; requires a general
        range (one spanning more than a single node)."""
        out = self._decompose_all(a, b)
        if len(out) < 2:
            raise ValueError("range is represented by a single node")
        return out

    def _top_groups(self, a, b):
        return group_by_height(self._decompose_all(a, b))[: self.cfg.top_count]

    def _accumulate(self, groups, scratch) -> None:
        for _, nodes in groups:
            for u in nodes:
                if u.height == 0:
                    scratch.bump(u.colour, 1)
                elif u.cand is not None:
                    for cid, cnt in u.cand.items():
                        scratch.bump(cid, cnt)
                else:
                    stack = [u]
                    while stack:
                        w = stack.pop()
                        if w.height:
                            stack.extend(w.children)
                        else:
                            scratch.bump(w.colour, 1)
                    self.stats["pruned_leaf_visits"] += u.weight

    def scan_pruned(self, v, a, b, m) -> dict:
        """Exact alpha-majorities of [a, b] within light node v, by leaf scan."""
        sc = self.scratch
        stack = [v]
        while stack:
            u = stack.pop()
            if u.height:
                stack.extend(u.children)
            elif a <= u.coord <= b:
                sc.bump(u.colour, 1)
        self.stats["pruned_leaf_visits"] += v.weight
        p, q = self._ap, self._aq
        return {cid: n for cid, n in sc.drain() if q * n > p * m}

    # ---- queries ----

    def query(self, lo, hi) -> set:
        return set(self.query_counts(lo, hi))

    def query_counts(self, lo, hi) -> dict:
        """Labels of the strict alpha-majorities of [lo, hi] with their
        exact in-range counts."""
        out = self._query_ids(lo, hi)
        label = self.registry.label_of
        return {label(cid): n for cid, n in out.items()}

    def _query_ids(self, lo, hi) -> dict:
        lo = self._query_bound(lo, "lo")
        hi = self._query_bound(hi, "hi")
        self.stats["queries"] += 1
        dbg = {"snapped": None, "m": 0, "mode": "empty", "groups": None, "drained": None}
        if self.capture_debug:
            self.last_query_debug = dbg
        if self.root is None or lo > hi:
            return {}
        snapped = self.snap(lo, hi)
        if snapped is None:
            return {}
        a, b = snapped
        m = self.F.count_range(a, b)
        p, q = self._ap, self._aq
        dbg["snapped"] = (a, b)
        dbg["m"] = m

        cover = self._cover_node(a, b)
        if cover.height == 0:
            dbg["mode"] = "single"
            dbg["result"] = {cover.colour: 1}
            return {cover.colour: 1}
        if cover.min_leaf.coord == a and cover.max_leaf.coord == b:
            if cover.cand is not None:
                out = {}
                for cid in cover.cand:
                    pc = self.per_colour.get(cid)
                    f = pc.count_range(a, b) if pc is not None else 0
                    if q * f > p * m:
                        out[cid] = f
                dbg["mode"] = "listed"
            else:
                out = self.scan_pruned(cover, a, b, m)
                dbg["mode"] = "pruned"
            dbg["result"] = out
            return out

        if self.key_kind == "int":
            wa = self._find_leaf(a)
            wb = self._find_leaf(b)
            groups = findtop(self, wa, wb, self.cfg.top_count)
        else:
            groups = self._top_groups(a, b)
        self._accumulate(groups, self.scratch)
        pairs = self.scratch.drain()
        out = {}
        for cid, tally in pairs:
            if 4 * q * tally > p * m:
                pc = self.per_colour.get(cid)
                f = pc.count_range(a, b) if pc is not None else 0
                if q * f > p * m:
                    out[cid] = f
        dbg["mode"] = "general"
        dbg["groups"] = groups
        dbg["drained"] = pairs
        dbg["result"] = out
        return out

    def _collect(self, lo, hi, scratch) -> int:
        """Accumulate candidate-mass tallies for [lo, hi] into a caller
        scratch without filtering; returns the range's point count.

        Serves the planar wrapper, which merges tallies across several
        sub-indexes before applying its own global filter.
        """
        snapped = self.snap(lo, hi)
        if snapped is None:
            return 0
        a, b = snapped
        m = self.F.count_range(a, b)
        cover = self._cover_node(a, b)
        if cover.height == 0:
            scratch.bump(cover.colour, 1)
            return m
        if cover.min_leaf.coord == a and cover.max_leaf.coord == b:
            if cover.cand is not None:
                for cid, cnt in cover.cand.items():
                    scratch.bump(cid, cnt)
            else:
                stack = [cover]
                while stack:
                    u = stack.pop()
                    if u.height:
                        stack.extend(u.children)
                    elif a <= u.coord <= b:
                        scratch.bump(u.colour, 1)
                self.stats["pruned_leaf_visits"] += cover.weight
            return m
        self._accumulate(self._top_groups(a, b), scratch)
        return m

    # ---- debug audits ----

    def audit_tree(self, deep=False) -> None:
        """Structural invariants; deep adds exact recounts of fresh lists."""
        self.scratch.audit_zero()
        if self.root is None:
            assert len(self.F) == 0
            return
        assert self.root.parent is None
        k_store = self.cfg.list_size

        def walk(v):
            if v.height == 0:
                assert v.alive
                self.registry.label_of(v.colour)
                return 1, v, v, (Counter((v.colour,)) if deep else None)
            assert v.alive
            deg = len(v.children)
            assert MIN_DEGREE <= deg <= MAX_DEGREE, f"degree {deg} at height {v.height}"
            w = 0
            counts = Counter() if deep else None
            prev_max = None
            for c in v.children:
                assert c.parent is v
                assert c.height == v.height - 1
                cw, cmin, cmax, ccounts = walk(c)
                assert c.weight == cw
                assert c.min_leaf is cmin and c.max_leaf is cmax
                if prev_max is not None:
                    assert prev_max.coord < cmin.coord
                prev_max = cmax
                w += cw
                if deep:
                    counts.update(ccounts)
            assert v.weight == w
            assert v.min_leaf is v.children[0].min_leaf
            assert v.max_leaf is v.children[-1].max_leaf
            if v.parent is not None:
                cap = BRANCH**v.height
                assert 2 * w >= cap, f"underweight {w} at height {v.height}"
                assert w <= 2 * cap, f"overweight {w} at height {v.height}"
            if v.cand is not None:
                assert v.weight > self.prune_cutoff
                assert len(v.cand) <= k_store
                assert v.staleness < v.rebuild_at
                for cid, cnt in v.cand.items():
                    assert 1 <= cnt <= v.weight
                if deep:
                    for cid, cnt in v.cand.items():
                        assert counts[cid] == cnt, "tracked count drifted from truth"
                    bn, bd = self.cfg.beta.numerator, self.cfg.beta.denominator
                    for cid, cnt in counts.items():
                        if cnt * bd > bn * v.weight:
                            assert cid in v.cand, "beta-majority missing from list"
                    if v.staleness == 0:
                        expect = dict(
                            heapq.nsmallest(
                                k_store, counts.items(), key=lambda kv: (-kv[1], kv[0])
                            )
                        )
                        assert v.cand == expect, "fresh list differs from exact recount"
            else:
                assert v.weight <= self.prune_cutoff
            return w, v.min_leaf, v.max_leaf, counts

        w, _, _, _ = walk(self.root)
        assert w == len(self.F)
        assert sum(len(pc) for pc in self.per_colour.values()) == len(self.F)
        if self._manage_registry:
            self.registry.audit()
            assert self.registry.capacity <= 2 * len(self.F)

    def leaves(self):
        """All leaves left to right (test support)."""
        if self.root is None:
            return
        stack = [self.root]
        while stack:
            v = stack.pop()
            if v.height:
                stack.extend(reversed(v.children))
            else:
                yield v

    def internal_nodes(self):
        if self.root is None or self.root.height == 0:
            return
        stack = [self.root]
        while stack:
            v = stack.pop()
            yield v
            for c in v.children:
                if c.height:
                    stack.append(c)
