"""Numerical core with a compiled extension and a pure-numpy fallback.

The compiled kernel is selected at import time when available; set
BBCSEC_BACKEND=python (or =compiled) to force a choice. `set_backend`
switches at runtime, which the benchmark uses to compare both.
"""

import os

from . import py_kernels as _py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_BACKENDS = {"python": _py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def available_backends():
    return tuple(sorted(_BACKENDS))


def set_backend(name: str):
    """Select the kernel implementation by name; returns the module."""
    global _active, chain_info, backend_name
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    _active = _BACKENDS[name]
    chain_info = _active.chain_info
    backend_name = name
    return _active


_requested = os.environ.get("BBCSEC_BACKEND")
if _requested:
    set_backend(_requested)
else:
    set_backend("compiled" if _compiled is not None else "python")
