"""Dynamic range majority index over coloured point sets.

Maintains points under insertion and deletion and reports, for any query
range, every colour held by strictly more than an alpha-fraction of the
points inside it. Variants cover real and integer coordinates, planar
point sets, and a positional colour array.
"""

from .errors import DuplicateKeyError
from .params import AlphaConfig

__version__ = "0.1.0"

__all__ = [
    "AlphaConfig",
    "DuplicateKeyError",
    "DynamicColourArray",
    "MajorityIndex",
    "MajorityIndex2D",
    "__version__",
]


def __getattr__(name):
    # Heavier modules load on first use so `import rangemaj` stays cheap.
    if name == "MajorityIndex":
        from .tree import MajorityIndex

        return MajorityIndex
    if name == "MajorityIndex2D":
        from .planar import MajorityIndex2D

        return MajorityIndex2D
    if name == "DynamicColourArray":
        from .colour_array import DynamicColourArray

        return DynamicColourArray
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
