"""Kernel backend selection.

Two interchangeable implementations of the per-pixel Poisson counting kernel
live here: a compiled Cython extension (``_core``) and a pure-numpy fallback
(``numpy_backend``). They produce bit-identical output; the compiled one is
just faster. The extension is picked automatically when it built; setting
``PGNOISE_BACKEND=numpy`` (or ``compiled``) before import forces a choice, and
:func:`set_backend` switches at runtime.
"""

import os

import numpy as np

from .. import errors
from . import numpy_backend

# Exact inversion up to this mean; normal approximation above. At 1000 the
# approximation's relative variance error is < 1e-4.
LAM_EXACT_MAX = 1000.0

# Zig-zag rounds before giving up on inversion. The walk needs about
# 6*sqrt(lam) rounds to cover +-6 sigma, so 4096 is unreachable for
# lam <= LAM_EXACT_MAX except when u lands in the ~1e-13 tail sliver.
MAX_INVERT_STEPS = 4096

try:
    from . import _core
except ImportError:
    _core = None

_BACKENDS = {"numpy": numpy_backend}
if _core is not None:
    _BACKENDS["compiled"] = _core

_active = _BACKENDS.get("compiled", numpy_backend)

_env = os.environ.get("PGNOISE_BACKEND")
if _env:
    if _env not in _BACKENDS:
        raise errors.InvalidInputError(
            f"PGNOISE_BACKEND={_env!r} not available; "
            f"choices: {sorted(_BACKENDS)}"
        )
    _active = _BACKENDS[_env]


def available_backends():
    """Names of the usable backends, sorted."""
    return sorted(_BACKENDS)


def active_backend():
    """Name of the backend currently in use."""
    return _active.name


def set_backend(name):
    """Select a kernel backend by name ("compiled" or "numpy")."""
    global _active
    if name not in _BACKENDS:
        raise errors.InvalidInputError(
            f"unknown backend {name!r}; choices: {sorted(_BACKENDS)}"
        )
    _active = _BACKENDS[name]


def poisson_counts(lam, pmode, kmode, u, gp,
                   lam_exact_max=LAM_EXACT_MAX, max_steps=MAX_INVERT_STEPS):
    """Dispatch to the active backend; see numpy_backend.poisson_counts."""
    return _active.poisson_counts(
        np.ascontiguousarray(lam, dtype=np.float64),
        np.ascontiguousarray(pmode, dtype=np.float64),
        np.ascontiguousarray(kmode, dtype=np.int64),
        np.ascontiguousarray(u, dtype=np.float64),
        np.ascontiguousarray(gp, dtype=np.float64),
        float(lam_exact_max),
        int(max_steps),
    )
