"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy implementation in ``_pykernels``.  Setting ``PREDTRACE_BACKEND=numpy``
forces the fallback.
"""
import os

from . import _pykernels

py = _pykernels

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("PREDTRACE_BACKEND", "").lower() != "numpy":
    active = compiled
else:
    active = _pykernels

BACKEND = active.NAME


def available():
    """Names of importable backends, compiled first."""
    return [m.NAME for m in (compiled, _pykernels) if m is not None]


def get(name=None):
    if name is None:
        return active
    if name == _pykernels.NAME:
        return _pykernels
    if name == "cython" and compiled is not None:
        return compiled
    raise ValueError(f"kernel backend {name!r} is not available")
