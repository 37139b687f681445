"""Two-segment piecewise Bezier curves joined C0 at a segmentation point.

A curve of degree ``d`` has ``2d + 1`` basis functions. The first ``d``
are Bernstein polynomials in the local parameter ``t / omega`` on
``[0, omega)``, the last ``d`` are Bernstein polynomials in
``(t - omega) / (1 - omega)`` on ``[omega, 1]``, and basis ``d`` is shared
by both segments and equals 1 at ``t = omega``.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from . import kernels
from .errors import QuasiDistError


@dataclass(frozen=True)
class BasisConfig:
    """Degree and segmentation point of the piecewise basis."""

    degree: int = 5
    omega: float = 0.5

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 1:
            raise QuasiDistError(f"degree must be an integer >= 1, got {self.degree}")
        if not 0.0 < self.omega < 1.0:
            raise QuasiDistError(f"omega must lie in (0, 1), got {self.omega}")

    @property
    def n_basis(self):
        return 2 * self.degree + 1


@dataclass(frozen=True, eq=False)
class PiecewiseBezierCurve:
    """Basis configuration plus a ``(2d+1, 2)`` array of control points."""

    config: BasisConfig
    controls: np.ndarray

    def __post_init__(self):
        controls = np.array(self.controls, dtype=np.float64)
        if controls.ndim != 2 or controls.shape[1] != 2:
            raise QuasiDistError("controls must be an array of planar points")
        if controls.shape[0] != self.config.n_basis:
            raise QuasiDistError(
                f"expected {self.config.n_basis} control points, got {controls.shape[0]}"
            )
        if not np.all(np.isfinite(controls)):
            raise QuasiDistError("control points must be finite")
        controls.setflags(write=False)
        object.__setattr__(self, "controls", controls)


def _check_t(t):
    if not 0.0 <= t <= 1.0:
        raise QuasiDistError(f"parameter t={t} outside [0, 1]")


def basis_eval(config, i, t):
    """Value of basis function `i` at parameter `t`.

    ``t == omega`` belongs to the right segment; both segments agree there.
    """
    d, w = config.degree, config.omega
    if not 0 <= i <= 2 * d:
        raise QuasiDistError(f"basis index {i} out of range 0..{2 * d}")
    _check_t(t)
    if t < w:
        if i > d:
            return 0.0
        s = t / w
        if i == d:
            return s ** d
        return comb(d, i) * (1.0 - s) ** (d - i) * s ** i
    if i < d:
        return 0.0
    v = (1.0 - t) / (1.0 - w)
    u = (t - w) / (1.0 - w)
    j = i - d
    return comb(d, j) * v ** (d - j) * u ** j


def basis_row(config, t):
    """All ``2d+1`` basis values at `t` as a vector."""
    _check_t(t)
    return kernels.basis_matrix(np.array([t], dtype=np.float64), config.omega, config.degree)[0]


def basis_matrix(config, ts):
    """Basis rows stacked for every parameter in `ts`."""
    ts = np.asarray(ts, dtype=np.float64)
    if ts.size and (ts.min() < 0.0 or ts.max() > 1.0):
        raise QuasiDistError("parameters must lie in [0, 1]")
    return kernels.basis_matrix(ts, config.omega, config.degree)


def curve_eval(curve, t):
    """Point ``B(t) = sum_i N_i(t) C_i``."""
    return basis_row(curve.config, t) @ curve.controls


def curve_sample(curve, n):
    """Evaluate the curve at ``t = k/n`` for ``k = 0..n`` (``n + 1`` points)."""
    if int(n) != n or n < 1:
        raise QuasiDistError(f"sample count must be a positive integer, got {n}")
    ts = np.arange(n + 1, dtype=np.float64) / n
    return kernels.basis_matrix(ts, curve.config.omega, curve.config.degree) @ curve.controls
