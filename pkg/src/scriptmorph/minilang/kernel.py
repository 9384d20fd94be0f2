"""Selects the active execution kernel at import time.

The compiled extension is preferred when it imported cleanly; the
pure-Python twin is the fallback.  ``SCRIPTMORPH_PURE=1`` forces the
fallback, which is handy for benchmarking and for debugging suspected
kernel divergences.
"""

import os

from . import kernels_py

if os.environ.get("SCRIPTMORPH_PURE"):
    active = kernels_py
else:
    try:
        from . import _kernels as active  # type: ignore[no-redef]
    except ImportError:
        active = kernels_py

tokenize = active.tokenize
run_ops = active.run_ops
levenshtein = active.levenshtein
IMPLEMENTATION = active.IMPLEMENTATION
