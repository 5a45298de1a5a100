"""Chain-search kernel with a compiled core and a pure-Python fallback.

The compiled extension (``chain_cy``, built from Cython) is preferred when
importable; otherwise the pure-Python twin is used. Selection can be forced
with ``THREATGRAPH_KERNEL=compiled|python|auto``.
"""

from __future__ import annotations

import os

from .chain_py import EMIT_ALL, EMIT_UNEXTENDABLE

_requested = os.environ.get("THREATGRAPH_KERNEL", "auto")
if _requested not in {"auto", "compiled", "python"}:
    raise ValueError(
        f"THREATGRAPH_KERNEL must be auto, compiled or python, got {_requested!r}"
    )

if _requested == "python":
    from .chain_py import filter_maximal, find_chains

    BACKEND = "python"
else:
    try:
        from .chain_cy import filter_maximal, find_chains  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from .chain_py import filter_maximal, find_chains  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = [
    "BACKEND",
    "EMIT_ALL",
    "EMIT_UNEXTENDABLE",
    "filter_maximal",
    "find_chains",
]
