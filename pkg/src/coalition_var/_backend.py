"""Kernel lane selection.

The compiled Cython kernels are preferred; the numpy kernels are the drop-in
fallback. ``COALITION_VAR_BACKEND=python`` forces the fallback,
``COALITION_VAR_BACKEND=compiled`` makes a missing extension a hard error.
"""

import os

_forced = os.environ.get("COALITION_VAR_BACKEND")

if _forced == "python":
    from coalition_var import _kernels_py as kernels
elif _forced == "compiled":
    from coalition_var import _kernels as kernels  # type: ignore[no-redef]
else:
    try:
        from coalition_var import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from coalition_var import _kernels_py as kernels  # type: ignore[no-redef]

BACKEND = kernels.BACKEND
HAVE_COMPILED = BACKEND == "compiled"
