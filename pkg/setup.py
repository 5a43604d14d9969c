"""Build script for the optional compiled swarm kernel.

The package works without the extension (a pure-Python engine is selected
at import time); building it makes the experiment sweeps 1-2 orders of
magnitude faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    directives = {
        "language_level": 3,
        "boundscheck": False,
        "wraparound": False,
        "cdivision": True,
        "initializedcheck": False,
    }
    ext_modules = cythonize(
        [
            # -ffp-contract=off keeps the compiler from fusing a*b+c into
            # FMA instructions, which would round differently from the
            # pure-Python engine and break bit-identity between the two.
            Extension(
                "qswarm._core",
                ["src/qswarm/_core.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives=directives,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
