"""Build script: compiles the optional speedup extension when Cython is present.

The package is fully functional without the extension; the pure-Python
kernels are selected at import time as a fallback.  Set SCRIPTMORPH_NO_EXT=1
to skip the extension build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SCRIPTMORPH_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/scriptmorph/minilang/_kernels.pyx",
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
