"""Kernel backend selection.

The compiled Cython extension is preferred when it imports; the pure-Python
module is the fallback and the reference. Set ``LNNPLAY_PURE_PY=1`` to force
the fallback (useful for the backend-equivalence tests and the benchmark).
Both backends implement the same four functions over the same arrays and
produce bit-identical float64 results.
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("LNNPLAY_PURE_PY"):
    kernels = pure
    _BACKEND = "python"
else:
    try:
        from . import _fast as kernels  # type: ignore[no-redef]

        _BACKEND = "compiled"
    except ImportError:
        kernels = pure
        _BACKEND = "python"


def backend_name() -> str:
    return _BACKEND


__all__ = ["kernels", "pure", "backend_name"]
