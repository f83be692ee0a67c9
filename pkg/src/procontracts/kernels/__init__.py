"""Relation kernels: compiled when the extension is built, numpy otherwise.

Set ``PROCONTRACTS_PURE=1`` to force the numpy backend.
"""

from __future__ import annotations

import os

from . import _pykernels

py = _pykernels

try:
    if os.environ.get("PROCONTRACTS_PURE"):
        raise ImportError("pure backend requested")
    from . import _ckernels as _active
    BACKEND = "cython"
except ImportError:
    _active = _pykernels
    BACKEND = "numpy"


def compiled():
    """The compiled module, or None if it was not built."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


compose = _active.compose
while_lfp = _active.while_lfp
unpack = _pykernels.unpack

__all__ = ["BACKEND", "compose", "while_lfp", "unpack", "compiled", "py"]
