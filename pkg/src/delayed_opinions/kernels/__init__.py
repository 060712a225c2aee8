"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``DELAYED_OPINIONS_DISABLE_NUMBA`` is unset or ``0``.  Both paths
expose the same four functions: ``lambertw0``, ``discrete_advance``,
``dde_advance`` and ``ode_advance``.
"""

import os

from . import _numpy

ENV_FLAG = "DELAYED_OPINIONS_DISABLE_NUMBA"


def _numba_requested():
    return os.environ.get(ENV_FLAG, "0").strip().lower() in ("", "0", "false", "no")


def _load_numba():
    try:
        from . import _numba
    except ImportError:
        return None
    return _numba


def get_backend(name=None):
    """Return the kernel module for ``name`` ("numba" or "numpy").

    ``None`` resolves the default from the environment.  Asking for "numba"
    explicitly when it is not installed raises ImportError.
    """
    if name is None:
        return backend
    if name == "numpy":
        return _numpy
    if name == "numba":
        mod = _load_numba()
        if mod is None:
            raise ImportError("numba backend requested but numba is not importable")
        return mod
    raise ValueError(f"unknown kernel backend {name!r}")


backend = (_load_numba() if _numba_requested() else None) or _numpy
BACKEND_NAME = "numba" if backend is not _numpy else "numpy"

lambertw0 = backend.lambertw0
discrete_advance = backend.discrete_advance
dde_advance = backend.dde_advance
ode_advance = backend.ode_advance

__all__ = [
    "BACKEND_NAME",
    "ENV_FLAG",
    "get_backend",
    "lambertw0",
    "discrete_advance",
    "dde_advance",
    "ode_advance",
]
