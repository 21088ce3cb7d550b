"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise, or when
``BELLUD_PURE_PYTHON=1`` is set, the numpy fallback takes over.
"""
import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("BELLUD_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

event_probabilities = _impl.event_probabilities
mesh_matrix = _impl.mesh_matrix
mesh_event_probabilities = _impl.mesh_event_probabilities
surrogate = _impl.surrogate
anneal = _impl.anneal

__all__ = ["BACKEND", "event_probabilities", "mesh_matrix", "mesh_event_probabilities",
           "surrogate", "anneal"]
