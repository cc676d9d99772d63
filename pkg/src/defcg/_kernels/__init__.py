"""Kernel backend selection.

Prefers the compiled Cython core and falls back to the numpy reference
implementation when the extension is missing. Override with
DEFCG_BACKEND=compiled|numpy (import fails if a forced backend is
unavailable).
"""

import os

_requested = os.environ.get("DEFCG_BACKEND", "").strip().lower()

if _requested in ("", "compiled", "cy", "c"):
    try:
        from . import _core as _impl
    except ImportError:
        if _requested:
            raise
        from . import _ref as _impl
elif _requested in ("numpy", "py", "ref"):
    from . import _ref as _impl
else:
    raise ImportError(f"unknown DEFCG_BACKEND value: {_requested!r}")

BACKEND = _impl.NAME

matvec = _impl.matvec
gemm = _impl.gemm
cholesky = _impl.cholesky
solve_lower = _impl.solve_lower
solve_lower_trans = _impl.solve_lower_trans
rbf_gram = _impl.rbf_gram
rbf_cross = _impl.rbf_cross
jacobi_sweep = _impl.jacobi_sweep


def load_backend(name):
    """Import a specific backend module by name (for benchmarks and tests)."""
    if name in ("numpy", "py", "ref"):
        from . import _ref
        return _ref
    if name in ("compiled", "cy", "c"):
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
