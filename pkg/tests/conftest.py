import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from quasidist import _pykernels  # noqa: E402

try:
    from quasidist import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route the public API through one kernel implementation."""
    from quasidist import kernels

    monkeypatch.setattr(kernels, "basis_matrix", request.param.basis_matrix)
    monkeypatch.setattr(kernels, "resample_max_below", request.param.resample_max_below)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
