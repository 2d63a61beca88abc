"""Builds the optional compiled interaction-walk kernel.

The package works without the extension (a pure-Python fallback is selected
at import time); building it makes full-size replicate batches several times
faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "firmsim.kernels._walk_cy",
                ["src/firmsim/kernels/_walk_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
