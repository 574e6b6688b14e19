"""Behavioural tests for the 1-D majority index."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rangemaj.errors import DuplicateKeyError
from rangemaj.fuzz import FuzzDriver
from rangemaj.oracle import NaiveStore, naive_majority
from rangemaj.tree import MajorityIndex, group_by_height


def small_index(alpha="1/2", kind="int"):
    pts = [(1, "r"), (2, "b"), (3, "r")]
    return MajorityIndex.build(pts, alpha, kind)


class TestBuild:
    def test_empty_build_queries_empty(self):
        idx = MajorityIndex.build([], "1/2")
        assert idx.query(0, 100) == set()
        assert idx.query_counts(-5, 5) == {}
        assert len(idx) == 0 and idx.root is None

    def test_three_point_majority(self):
        idx = small_index()
        assert idx.query(1, 3) == {"r"}
        assert idx.query_counts(1, 3) == {"r": 2}

    def test_sizes_after_build(self):
        pts = [(i, "c%d" % (i % 7)) for i in range(500)]
        idx = MajorityIndex.build(pts, "1/4")
        assert len(idx) == 500
        assert idx.root.weight == 500
        idx.audit_tree(deep=True)

    def test_duplicate_coordinate_rejected(self):
        with pytest.raises(DuplicateKeyError):
            MajorityIndex.build([(1, "a"), (1, "b")], "1/2")

    def test_build_matches_incremental(self):
        rng = random.Random(4)
        pts = [(c, "c%d" % rng.randrange(6)) for c in rng.sample(range(10000), 800)]
        bulk = MajorityIndex.build(pts, "1/10")
        inc = MajorityIndex("1/10")
        for c, lab in pts:
            inc.insert(c, lab)
        bulk.audit_tree(deep=True)
        inc.audit_tree(deep=True)
        for _ in range(300):
            lo = rng.randrange(-100, 10100)
            hi = rng.randrange(lo, 10100)
            assert bulk.query_counts(lo, hi) == inc.query_counts(lo, hi)


class TestStrictness:
    def test_exact_half_is_not_reported(self):
        idx = MajorityIndex.build([(1, "r"), (2, "b")], "1/2")
        assert idx.query(1, 2) == set()

    def test_just_over_half_is_reported(self):
        idx = MajorityIndex.build([(1, "r"), (2, "b"), (3, "r")], "1/2")
        assert idx.query(1, 3) == {"r"}

    def test_empty_window_inside_points(self):
        idx = MajorityIndex.build([(1, "r"), (5, "b"), (9, "r")], "1/2")
        assert idx.query(10, 20) == set()
        assert idx.query(6, 8) == set()

    def test_reversed_bounds_empty(self):
        idx = small_index()
        assert idx.query(3, 1) == set()


class TestSnap:
    def test_snap_interior(self):
        idx = MajorityIndex.build([(1, "a"), (5, "b"), (9, "c")], "1/2")
        assert idx.snap(2, 8) == (5, 5)

    def test_snap_exact_endpoints(self):
        idx = MajorityIndex.build([(1, "a"), (5, "b"), (9, "c")], "1/2")
        assert idx.snap(1, 9) == (1, 9)

    def test_snap_empty_gap(self):
        idx = MajorityIndex.build([(1, "a"), (5, "b"), (9, "c")], "1/2")
        assert idx.snap(6, 8) is None

    def test_snap_overshoot_clamps(self):
        idx = MajorityIndex.build([(1, "a"), (5, "b"), (9, "c")], "1/2")
        assert idx.snap(-100, 100) == (1, 9)


class TestUpdates:
    def test_insert_into_empty_then_point_query(self):
        idx = MajorityIndex("1/2")
        idx.insert(7, "g")
        assert idx.query(7, 7) == {"g"}
        assert idx.query(0, 100) == {"g"}

    def test_duplicate_insert_raises(self):
        idx = small_index()
        with pytest.raises(DuplicateKeyError):
            idx.insert(2, "z")

    def test_delete_absent_raises(self):
        idx = small_index()
        with pytest.raises(KeyError):
            idx.delete(42)
        with pytest.raises(KeyError):
            MajorityIndex("1/2").delete(1)

    def test_insert_delete_roundtrip(self):
        idx = small_index()
        idx.insert(10, "b")
        idx.delete(10)
        assert idx.query_counts(1, 3) == {"r": 2}
        idx.audit_tree(deep=True)

    def test_delete_to_empty_and_refill(self):
        idx = MajorityIndex.build([(i, "x") for i in range(50)], "1/2")
        for i in range(50):
            idx.delete(i)
        assert len(idx) == 0 and idx.root is None
        idx.insert(3, "y")
        assert idx.query(0, 10) == {"y"}

    def test_coordinate_validation_int(self):
        idx = MajorityIndex("1/2", "int")
        with pytest.raises(ValueError):
            idx.insert(1.5, "a")
        with pytest.raises(ValueError):
            idx.insert(True, "a")
        with pytest.raises(ValueError):
            idx.insert(1 << 63, "a")
        idx.insert((1 << 62) - 1, "a")
        assert idx.query(0, 1 << 62) == {"a"}

    def test_coordinate_validation_float(self):
        idx = MajorityIndex("1/2", "float")
        with pytest.raises(ValueError):
            idx.insert(float("nan"), "a")
        with pytest.raises(ValueError):
            idx.insert(float("inf"), "a")
        idx.insert(2.5, "a")
        assert idx.query(2.0, 3.0) == {"a"}


class TestCandidateLists:
    def test_top_two_of_three_colours(self):
        # frequencies 5, 3, 1 with a list of size >= 2 keeps both heavy colours
        pts = [(i, "heavy") for i in range(5)]
        pts += [(10 + i, "mid") for i in range(3)]
        pts += [(20, "rare")]
        idx = MajorityIndex.build(pts, "1/2")
        node = idx.root
        idx.rebuild_list(node)
        heavy = idx.registry.id_of("heavy")
        mid = idx.registry.id_of("mid")
        assert node.cand[heavy] == 5
        assert node.cand[mid] == 3
        ranked = sorted(node.cand.items(), key=lambda kv: -kv[1])[:2]
        assert [cid for cid, _ in ranked] == [heavy, mid]

    def test_single_colour_list(self):
        idx = MajorityIndex.build([(i, "only") for i in range(200)], "1/2")
        idx.rebuild_list(idx.root)
        assert idx.root.cand == {idx.registry.id_of("only"): 200}

    def test_rebuild_is_lazy_until_threshold(self):
        # a fresh list absorbs threshold-1 updates, the next one rebuilds
        idx = MajorityIndex.build([(i, "c%d" % (i % 9)) for i in range(420)], "1/2")
        v = idx.root
        idx.rebuild_list(v)
        thresh = v.rebuild_at
        assert thresh == 10  # ceil((1/21)*420/2)
        serial = v.rebuild_serial
        base = 10**6
        for i in range(thresh - 1):
            idx.insert(base + i, "fresh")
            assert v.rebuild_serial == serial, f"rebuilt early at update {i + 1}"
        idx.insert(base + thresh, "fresh")
        assert v.rebuild_serial == serial + 1
        assert v.staleness == 0

    def test_tracked_counts_stay_exact(self):
        idx = MajorityIndex.build([(i, "a" if i % 3 else "b") for i in range(300)], "1/2")
        v = idx.root
        idx.rebuild_list(v)
        aid = idx.registry.id_of("a")
        before = v.cand[aid]
        idx.insert(1000, "a")
        idx.insert(1001, "a")
        idx.delete(1000)
        if v.cand is not None and aid in v.cand and idx.root is v:
            assert v.cand[aid] == before + 1

    def test_pruned_small_nodes_have_no_list(self):
        idx = MajorityIndex.build([(i, "x") for i in range(5)], "1/2")
        assert idx.root.cand is None  # 5 <= prune cutoff for alpha=1/2
        assert idx.query(0, 4) == {"x"}


class TestQueryPaths:
    def test_single_node_pruned_path(self):
        idx = MajorityIndex.build([(1, "r"), (2, "b"), (3, "r")], "1/2")
        idx.capture_debug = True
        assert idx.query(1, 3) == {"r"}
        assert idx.last_query_debug["mode"] in ("pruned", "listed", "single")

    def test_single_leaf_path(self):
        idx = MajorityIndex.build([(i, "c%d" % i) for i in range(100)], "1/2")
        idx.capture_debug = True
        assert idx.query(17, 17) == {"c17"}
        assert idx.last_query_debug["mode"] == "single"

    def test_listed_exact_cover(self):
        idx = MajorityIndex.build([(i, "maj" if i % 2 else "c%d" % i) for i in range(512)], "1/2")
        idx.capture_debug = True
        got = idx.query_counts(0, 511)
        assert idx.last_query_debug["mode"] == "listed"
        assert got == {}  # 256 of 512 is exactly half, strictness excludes it
        idx.delete(0)
        assert idx.query(0, 511) == {"maj"}

    def test_general_path_matches_oracle(self):
        rng = random.Random(12)
        pts = [(c, "c%d" % rng.randrange(5)) for c in rng.sample(range(5000), 1500)]
        idx = MajorityIndex.build(pts, "1/4")
        idx.capture_debug = True
        general = 0
        for _ in range(200):
            lo = rng.randrange(0, 5000)
            hi = rng.randrange(lo, 5000)
            want = naive_majority(pts, lo, hi, "1/4")
            assert idx.query(lo, hi) == want
            if idx.last_query_debug["mode"] == "general":
                general += 1
        assert general > 50

    def test_decompose_partitions_and_rejects_single(self):
        rng = random.Random(9)
        idx = MajorityIndex.build([(c, "x") for c in range(1000)], "1/2")
        with pytest.raises(ValueError):
            idx.decompose(0, 999)  # root covers the whole range
        for _ in range(100):
            lo = rng.randrange(0, 900)
            hi = rng.randrange(lo + 20, 1000)
            try:
                nodes = idx.decompose(lo, hi)
            except ValueError:
                continue
            total = sum(n.weight for n in nodes)
            assert total == hi - lo + 1
            leaves = sorted(
                l.coord for n in nodes for l in (iter_leaves(n))
            )
            assert leaves == list(range(lo, hi + 1))
            groups = group_by_height(nodes)
            hs = [h for h, _ in groups]
            assert hs == sorted(hs, reverse=True)


def iter_leaves(node):
    stack = [node]
    while stack:
        v = stack.pop()
        if v.height:
            stack.extend(v.children)
        else:
            yield v


class TestScanPruned:
    def test_three_leaf_scan(self):
        idx = MajorityIndex.build([(1, "r"), (2, "b"), (3, "r")], "1/2")
        assert idx.query(1, 3) == {"r"}

    def test_single_leaf_any_alpha(self):
        idx = MajorityIndex.build([(1, "r"), (2, "b"), (3, "r")], "99/100")
        assert idx.query(2, 2) == {"b"}

    def test_partial_overlap_of_pruned_cover(self):
        # range snaps inside one small node; exact filtering applies
        idx = MajorityIndex.build([(i, "r" if i < 2 else "b") for i in range(4)], "1/2")
        assert idx.query(0, 1) == {"r"}
        assert idx.query(1, 2) == set()
        assert idx.query(2, 3) == {"b"}


class TestRemapIntegration:
    def test_mass_deletion_compacts_labels(self):
        idx = MajorityIndex("1/2")
        for i in range(600):
            idx.insert(i, "c%d" % i)
        for i in range(580):
            idx.delete(i)
        assert len(idx) == 20
        assert idx.registry.capacity <= 40
        idx.audit_tree(deep=True)
        assert idx.query_counts(580, 599) == {}
        assert idx.query(599, 599) == {"c599"}

    def test_queries_correct_across_remap(self):
        d = FuzzDriver("1/2", seed=77, coord_lo=0, coord_hi=800, n_colours=400)
        d.p_insert, d.p_delete = 0.30, 0.45
        d.run(6000)
        d.index.audit_tree(deep=True)


class TestOracleEquivalence:
    @pytest.mark.parametrize("alpha", ["1/2", "1/4", "1/10"])
    def test_random_queries_random_points(self, alpha):
        rng = random.Random(hash(alpha) & 0xFFFF)
        n = 2000
        pts = [(c, "c%d" % rng.randrange(12)) for c in rng.sample(range(40000), n)]
        idx = MajorityIndex.build(pts, alpha)
        store = NaiveStore()
        for c, lab in pts:
            store.insert(c, lab)
        p = idx.cfg.alpha.numerator
        q = idx.cfg.alpha.denominator
        for _ in range(400):
            lo = rng.randrange(-10, 40010)
            hi = rng.randrange(lo, 40010)
            m, counts = store.counts(lo, hi)
            want = {lab: f for lab, f in counts.items() if q * f > p * m}
            assert idx.query_counts(lo, hi) == want

    @pytest.mark.parametrize("kind", ["int", "float", "object"])
    def test_mixed_ops_each_kind(self, kind):
        d = FuzzDriver(
            "1/4", key_kind=kind, seed=101, coord_lo=0, coord_hi=2500,
            n_colours=10, zipf_a=1.2, lemma_audits=True, audit_every=600,
            deep_every=3000,
        )
        d.run(5000)
        d.index.audit_tree(deep=True)
        assert d.general_queries > 100
        assert d.auditor.checks == d.general_queries

    def test_heavy_delete_mix(self):
        d = FuzzDriver("1/2", seed=5, coord_lo=0, coord_hi=3000, n_colours=8,
                       lemma_audits=True, audit_every=500)
        d.seed_points(2500)
        d.p_insert, d.p_delete = 0.15, 0.55
        d.run(6000)
        d.index.audit_tree(deep=True)
        assert d.index.stats["merges"] > 0

    @settings(max_examples=60, deadline=None)
    @given(
        ops=st.lists(
            st.tuples(
                st.sampled_from(["i", "d", "q"]),
                st.integers(min_value=0, max_value=60),
                st.integers(min_value=0, max_value=4),
            ),
            max_size=120,
        )
    )
    def test_hypothesis_op_sequences(self, ops):
        idx = MajorityIndex("1/3")
        mirror = {}
        for kind, coord, col in ops:
            lab = "c%d" % col
            if kind == "i" and coord not in mirror:
                idx.insert(coord, lab)
                mirror[coord] = lab
            elif kind == "d" and coord in mirror:
                idx.delete(coord)
                del mirror[coord]
            else:
                lo, hi = sorted((coord, coord + 7))
                pts = list(mirror.items())
                want = naive_majority(pts, lo, hi, "1/3")
                assert idx.query(lo, hi) == want
        idx.audit_tree(deep=True)


class TestStats:
    def test_counters_move(self):
        d = FuzzDriver("1/2", seed=2, coord_lo=0, coord_hi=900, n_colours=6)
        d.run(3000)
        s = d.index.stats
        assert s["queries"] == d.queries
        assert s["list_rebuilds"] > 0
        assert s["rebuild_leaf_work"] > 0

    def test_rebuild_work_amortized(self):
        # over U updates the rebuild leaf work stays within c*U*lg(n)/alpha
        import math

        d = FuzzDriver("1/10", seed=33, coord_lo=0, coord_hi=10**6, n_colours=16)
        d.seed_points(4000)
        base = d.index.stats["rebuild_leaf_work"]
        updates = 0
        while updates < 12000:
            if d.rng.random() < 0.5:
                d.do_insert()
            else:
                d.do_delete()
            updates += 1
        work = d.index.stats["rebuild_leaf_work"] - base
        n = max(len(d.index), 2)
        bound = 50 * updates * math.log2(n) / float(d.index.cfg.alpha)
        assert work <= bound, f"rebuild work {work} exceeds {bound:.0f}"
