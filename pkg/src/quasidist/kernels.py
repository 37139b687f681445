"""Kernel backend selection.

The compiled extension ``quasidist._ckernels`` is used when it imports;
otherwise the numpy versions in ``quasidist._pykernels`` are used. Set
``QUASIDIST_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("QUASIDIST_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

basis_matrix = _impl.basis_matrix
resample_max_below = _impl.resample_max_below
