"""Counted ordered set: examples, oracle equivalence, structural churn."""

import random
import subprocess
import sys
from bisect import bisect_left, bisect_right, insort

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rangemaj import backend
from rangemaj.counted_set import CountedOrderedSet


def _variants():
    out = [("pure", "object")]
    if backend.have_native():
        out += [("native", "int"), ("native", "float")]
    return out


VARIANTS = _variants()


@pytest.fixture(params=VARIANTS, ids=lambda v: f"{v[0]}-{v[1]}")
def variant(request):
    return request.param


def make(variant):
    bk, kind = variant
    return backend.make_counted_set(kind, backend=bk)


class SortedRef:
    """Mirror built on a plain sorted list, the obviously-correct baseline."""

    def __init__(self):
        self.a = []

    def insert(self, k):
        insort(self.a, k)

    def delete(self, k):
        i = bisect_left(self.a, k)
        assert i < len(self.a) and self.a[i] == k
        del self.a[i]

    def count_range(self, lo, hi):
        if lo > hi:
            return 0
        return bisect_right(self.a, hi) - bisect_left(self.a, lo)

    def predecessor(self, x):
        i = bisect_right(self.a, x)
        return self.a[i - 1] if i else None

    def successor(self, x):
        i = bisect_left(self.a, x)
        return self.a[i] if i < len(self.a) else None


def test_insert_examples(variant):
    cs = make(variant)
    cs.insert(5)
    assert cs.count_range(5, 5) == 1
    cs.insert(5)
    assert cs.count_range(5, 5) == 2

    cs2 = make(variant)
    for k in (1, 3, 9):
        cs2.insert(k)
    assert cs2.count_range(2, 9) == 2


def test_delete_examples(variant):
    cs = make(variant)
    cs.insert(5)
    cs.insert(5)
    cs.delete(5)
    assert cs.count_range(5, 5) == 1

    with pytest.raises(KeyError):
        cs.delete(4)

    # delete then reinsert restores every count
    cs3 = make(variant)
    for k in (2, 4, 4, 7):
        cs3.insert(k)
    before = [cs3.count_range(lo, hi) for lo in range(9) for hi in range(lo, 9)]
    cs3.delete(4)
    cs3.insert(4)
    after = [cs3.count_range(lo, hi) for lo in range(9) for hi in range(lo, 9)]
    assert before == after


def test_count_range_examples(variant):
    cs = make(variant)
    for k in (1, 2, 3):
        cs.insert(k)
    assert cs.count_range(1, 3) == 3
    assert cs.count_range(4, 9) == 0
    assert cs.count_range(3, 1) == 0

    cs2 = make(variant)
    for k in (2, 4, 4, 7):
        cs2.insert(k)
    assert cs2.count_range(3, 6) == 2


def test_predecessor_successor_examples(variant):
    cs = make(variant)
    for k in (1, 5, 9):
        cs.insert(k)
    assert cs.successor(2) == 5
    assert cs.predecessor(0) is None
    assert cs.predecessor(5) == 5
    assert cs.successor(9) == 9
    assert cs.successor(10) is None
    assert cs.predecessor(100) == 9


def test_empty_set(variant):
    cs = make(variant)
    assert len(cs) == 0
    assert cs.count_range(0, 100) == 0
    assert cs.predecessor(5) is None
    assert cs.successor(5) is None
    assert 5 not in cs
    with pytest.raises(KeyError):
        cs.delete(5)


def test_mixed_oracle(variant):
    # primary variants get the full 1e5-op run, the rest a shorter one
    n_ops = 100_000 if variant in (("pure", "object"), ("native", "int")) else 20_000
    rng = random.Random(0xC0DE + n_ops)
    cs = make(variant)
    ref = SortedRef()
    for step in range(n_ops):
        r = rng.random()
        if r < 0.45 or not ref.a:
            k = rng.randint(0, 10_000)
            cs.insert(k)
            ref.insert(k)
        elif r < 0.70:
            k = ref.a[rng.randrange(len(ref.a))]
            cs.delete(k)
            ref.delete(k)
        else:
            lo = rng.randint(0, 10_000)
            hi = rng.randint(0, 10_000)
            got = cs.count_range(lo, hi)
            assert got == ref.count_range(lo, hi)
            # the two internal formulations must agree on every query
            if lo <= hi:
                assert got == cs.rank_le(hi) - cs.rank_lt(lo)
            x = rng.randint(-5, 10_005)
            assert cs.predecessor(x) == ref.predecessor(x)
            assert cs.successor(x) == ref.successor(x)
        if step % 4000 == 0:
            cs.audit()
            assert len(cs) == len(ref.a)
    cs.audit()
    assert len(cs) == len(ref.a)


def test_structural_churn(variant):
    rng = random.Random(7)
    keys = list(range(5000))
    rng.shuffle(keys)
    cs = make(variant)
    for i, k in enumerate(keys):
        cs.insert(k)
        if i % 500 == 0:
            cs.audit()
    cs.audit()
    assert len(cs) == 5000
    assert cs.count_range(0, 4999) == 5000

    rng.shuffle(keys)
    for i, k in enumerate(keys):
        cs.delete(k)
        if i % 500 == 0:
            cs.audit()
    cs.audit()
    assert len(cs) == 0
    # the structure must stay usable after a full drain
    cs.insert(42)
    assert cs.count_range(0, 100) == 1


def test_duplicates_span_blocks(variant):
    cs = make(variant)
    ref = SortedRef()
    for _ in range(900):
        cs.insert(500)
        ref.insert(500)
    for k in (499, 501, 500):
        cs.insert(k)
        ref.insert(k)
    cs.audit()
    assert cs.count_range(500, 500) == 901
    assert cs.count_range(499, 501) == 903
    assert cs.rank_lt(500) == 1
    assert cs.rank_le(500) == 902
    for _ in range(901):
        cs.delete(500)
        ref.delete(500)
    cs.audit()
    assert cs.count_range(499, 501) == ref.count_range(499, 501) == 2


def test_load_sorted(variant):
    rng = random.Random(13)
    keys = sorted(rng.randint(0, 2000) for _ in range(3000))
    cs = backend.counted_set_from_sorted(keys, variant[1], backend=variant[0])
    cs.audit()
    inc = make(variant)
    for k in keys:
        inc.insert(k)
    for _ in range(400):
        lo = rng.randint(-10, 2010)
        hi = rng.randint(-10, 2010)
        assert cs.count_range(lo, hi) == inc.count_range(lo, hi)
        assert cs.predecessor(lo) == inc.predecessor(lo)
        assert cs.successor(hi) == inc.successor(hi)
    assert len(cs) == len(inc) == 3000

    empty = backend.counted_set_from_sorted([], variant[1], backend=variant[0])
    assert len(empty) == 0
    empty.insert(1)
    assert len(empty) == 1


def test_contains(variant):
    cs = make(variant)
    for k in (3, 8, 8, 15):
        cs.insert(k)
    assert 8 in cs
    assert 3 in cs
    assert 4 not in cs
    cs.delete(8)
    assert 8 in cs
    cs.delete(8)
    assert 8 not in cs


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(st.sampled_from(["i", "d", "q"]), st.integers(0, 50), st.integers(0, 50)),
        max_size=120,
    )
)
def test_property_vs_reference(ops):
    cs = CountedOrderedSet()
    ref = SortedRef()
    for op, a, b in ops:
        if op == "i":
            cs.insert(a)
            ref.insert(a)
        elif op == "d":
            if ref.a:
                k = ref.a[a % len(ref.a)]
                cs.delete(k)
                ref.delete(k)
        else:
            lo, hi = min(a, b), max(a, b)
            assert cs.count_range(lo, hi) == ref.count_range(lo, hi)
            assert cs.count_range(lo, hi) == cs.rank_le(hi) - cs.rank_lt(lo)
            assert cs.predecessor(a) == ref.predecessor(a)
            assert cs.successor(a) == ref.successor(a)
    cs.audit()
    assert len(cs) == len(ref.a)


def test_object_keys_pure():
    # tuple keys order lexicographically; the pure backend must serve them
    cs = backend.make_counted_set("object")
    assert isinstance(cs, CountedOrderedSet)
    for key in [(3.0, 1), (1.0, 2), (3.0, 0), (2.5, 7)]:
        cs.insert(key)
    assert cs.count_range((1.0, 0), (3.0, 0)) == 3
    assert cs.successor((2.6, 0)) == (3.0, 0)
    assert cs.predecessor((3.0, 99)) == (3.0, 1)


@pytest.mark.skipif(not backend.have_native(), reason="extension not built")
def test_native_matches_pure_trace():
    rng = random.Random(99)
    fast = backend.make_counted_set("int", backend="native")
    pure = backend.make_counted_set("int", backend="pure")
    live = []
    for _ in range(30_000):
        r = rng.random()
        if r < 0.5 or not live:
            k = rng.randint(-(2**40), 2**40)
            fast.insert(k)
            pure.insert(k)
            live.append(k)
        elif r < 0.75:
            k = live.pop(rng.randrange(len(live)))
            fast.delete(k)
            pure.delete(k)
        else:
            lo = rng.randint(-(2**40), 2**40)
            hi = lo + rng.randint(0, 2**39)
            assert fast.count_range(lo, hi) == pure.count_range(lo, hi)
            assert fast.predecessor(lo) == pure.predecessor(lo)
            assert fast.successor(lo) == pure.successor(lo)
            assert fast.rank_lt(hi) == pure.rank_lt(hi)
            assert fast.rank_le(hi) == pure.rank_le(hi)
    fast.audit()
    pure.audit()
    assert len(fast) == len(pure)


def test_make_counted_set_rejects_unknown_kind():
    with pytest.raises(ValueError):
        backend.make_counted_set("decimal")


def test_backend_env_override():
    code = "import rangemaj.backend as b; print(b.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "RANGE_MAJ_BACKEND": "pure"},
    )
    assert out.returncode == 0
    assert out.stdout.strip() == "pure"

    bad = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "RANGE_MAJ_BACKEND": "sideways"},
    )
    assert bad.returncode != 0
