"""Selects between the compiled and pure counted-set backends.

The compiled extension is optional; absence of it degrades to the pure
module silently. Set RANGE_MAJ_BACKEND=pure|native to force a choice
(native raises if the extension did not build).
"""

from __future__ import annotations

import os

from .counted_set import CountedOrderedSet

_pref = os.environ.get("RANGE_MAJ_BACKEND", "auto").lower()
if _pref not in ("auto", "native", "pure"):
    raise RuntimeError(
        f"RANGE_MAJ_BACKEND must be auto, native or pure, not {_pref!r}"
    )

_native = None
if _pref in ("auto", "native"):
    try:
        from . import _counted_fast as _native
    except ImportError:
        _native = None
    if _pref == "native" and _native is None:
        raise RuntimeError(
            "RANGE_MAJ_BACKEND=native but the compiled extension is unavailable"
        )

BACKEND = "pure" if _native is None else "native"

_KINDS = ("int", "float", "object")


def have_native() -> bool:
    return _native is not None


def make_counted_set(kind: str = "object", backend: str | None = None):
    """New empty counted set for the given key kind.

    kinds: "int" (64-bit range), "float" (finite doubles), "object"
    (any orderable Python values; always served by the pure backend).
    ``backend`` overrides the module-wide selection, for benchmarks.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown key kind {kind!r}")
    if backend is None:
        backend = BACKEND
    if backend == "native":
        if _native is None:
            raise RuntimeError("compiled backend unavailable")
        if kind == "int":
            return _native.CountedSetI64()
        if kind == "float":
            return _native.CountedSetF64()
        # no compiled variant for arbitrary objects
        return CountedOrderedSet()
    return CountedOrderedSet()


def counted_set_from_sorted(keys, kind: str = "object", backend: str | None = None):
    cs = make_counted_set(kind, backend)
    cs.load_sorted(keys)
    return cs
