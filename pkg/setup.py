import os

from setuptools import Extension, setup

# The compiled counter backend is an optional speedup; the package runs on
# the pure-Python backend wherever the extension cannot be built.
ext_modules = []
_pyx = "src/rangemaj/_counted_fast.pyx"
if os.environ.get("RANGE_MAJ_PURE") != "1" and os.path.exists(_pyx):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "rangemaj._counted_fast",
                    [_pyx],
                    language="c++",
                    optional=True,
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
