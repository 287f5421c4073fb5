"""Hot-loop kernels with backend selection at import.

The compiled Cython core is preferred; the numpy fallback is used when the
extension is missing or when the NULLJAM_PURE_PYTHON environment variable is
set (any nonempty value).  Both expose the same functions:

    rhs_batch(y, params)             -> (n, 8) derivatives
    propagate(y0, dt, nsteps, params) -> (n, 8) final states
    propagate_dense(y0, dt, nsteps, params) -> (nsteps + 1, 8) path
"""

from __future__ import annotations

import os

from . import fallback

try:
    from . import _core as _compiled
except ImportError:
    _compiled = None

if _compiled is not None and not os.environ.get("NULLJAM_PURE_PYTHON"):
    _active = _compiled
else:
    _active = fallback

HAVE_COMPILED = _compiled is not None

rhs_batch = _active.rhs_batch
propagate = _active.propagate
propagate_dense = _active.propagate_dense


def backend_name() -> str:
    return "compiled" if _active is _compiled else "fallback"


def get_backend(name: str):
    """Return a specific backend module ("compiled" or "fallback"); used by
    the benchmark and the cross-checking tests."""
    if name == "fallback":
        return fallback
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
