"""Least-squares piecewise Bezier fitting of histogram signals.

The histogram points ``(k, P_k)`` are parameterized by cumulative chord
length, the control points are found by least squares against the basis
design matrix, and the fitted curve is read back onto the bin indices by
taking, for each ``k``, the curve sample with the largest x strictly below
``k``. The segmentation point is chosen by scanning a grid and keeping the
fit with the smallest mean squared deviation.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .bezier import BasisConfig, PiecewiseBezierCurve, curve_sample
from .errors import NumericError, QuasiDistError
from .histogram import histogram_points

SAMPLES_PER_BIN = 16
DEFAULT_GRID = (0.05, 0.95, 0.002)


@dataclass(frozen=True, eq=False)
class SampledSignal:
    values: np.ndarray
    n: int
    index: np.ndarray = None


@dataclass(frozen=True, eq=False)
class FittedCurve:
    curve: PiecewiseBezierCurve
    ts: np.ndarray
    mse: float
    signal: SampledSignal
    condition_flag: bool = False
    nonmonotone: bool = False

    @property
    def omega(self):
        return self.curve.config.omega


def chord_length_parameterize(points):
    """Cumulative chord-length parameters in ``[0, 1]``, one per point."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 2:
        raise QuasiDistError("need at least 2 points")
    chords = np.linalg.norm(np.diff(points, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(chords)])
    total = cum[-1]
    if not total > 0.0:
        raise NumericError("all points coincide; chord length is zero")
    ts = cum / total
    ts[-1] = 1.0
    return ts


def assemble_design_matrix(ts, config):
    """``K x (2d+1)`` matrix with entries ``N_i(t_k)``."""
    ts = np.asarray(ts, dtype=np.float64)
    if ts.shape[0] < config.n_basis:
        raise NumericError(
            f"under-determined fit: {ts.shape[0]} points for {config.n_basis} basis functions"
        )
    return kernels.basis_matrix(ts, config.omega, config.degree)


def solve_least_squares(phi, points):
    """Minimum-residual control points for both coordinates.

    Solved with an SVD-based least-squares routine, which also yields the
    minimum-norm solution when `phi` is rank deficient.

    Returns
    -------
    controls : ndarray, shape (2d+1, 2)
    rank_deficient : bool
    """
    phi = np.asarray(phi, dtype=np.float64)
    points = np.asarray(points, dtype=np.float64)
    if points.shape[0] != phi.shape[0]:
        raise QuasiDistError(
            f"dimension mismatch: {phi.shape[0]} rows vs {points.shape[0]} points"
        )
    controls, _, rank, _ = np.linalg.lstsq(phi, points, rcond=None)
    return controls, bool(rank < phi.shape[1])


def resample_to_signal(samples, k_bins):
    """Read a sampled curve back onto bin indices ``1..k_bins``.

    For each k the y of the sample with the largest x strictly below k is
    taken (last in parameter order on ties). When no sample lies below 1,
    bin 1 takes the first sample's y.
    """
    samples = np.asarray(samples, dtype=np.float64)
    values, index = kernels.resample_max_below(samples[:, 0], samples[:, 1], k_bins)
    if index[0] < 0:
        index = index.copy()
        values = values.copy()
        index[0] = 0
        values[0] = samples[0, 1]
    if np.any(index < 0):
        k = int(np.flatnonzero(index < 0)[0]) + 1
        raise NumericError(f"curve x-range does not reach below bin {k}")
    return SampledSignal(values=values, n=samples.shape[0] - 1, index=index)


def mse(signal, hist):
    """Mean squared deviation between a resampled signal and the histogram."""
    a = signal.values if isinstance(signal, SampledSignal) else np.asarray(signal, dtype=np.float64)
    b = hist.probs if hasattr(hist, "probs") else np.asarray(hist, dtype=np.float64)
    if a.shape != b.shape:
        raise QuasiDistError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.mean((a - b) ** 2))


def _is_nonmonotone(samples, k_bins):
    return bool(np.any(np.diff(samples[:, 0]) < -1e-9 * k_bins))


def _fit(points, ts, probs, config, n_samples):
    phi = assemble_design_matrix(ts, config)
    controls, flag = solve_least_squares(phi, points)
    curve = PiecewiseBezierCurve(config, controls)
    samples = curve_sample(curve, n_samples)
    signal = resample_to_signal(samples, probs.shape[0])
    return FittedCurve(
        curve=curve,
        ts=ts,
        mse=mse(signal, probs),
        signal=signal,
        condition_flag=flag,
        nonmonotone=_is_nonmonotone(samples, probs.shape[0]),
    )


def fit_curve(hist, omega, degree=5, n_samples=None):
    """Fit the histogram at a fixed segmentation point.

    `n_samples` defaults to 16 samples per bin.
    """
    config = BasisConfig(degree=degree, omega=omega)
    points = histogram_points(hist)
    if points.shape[0] < config.n_basis:
        raise NumericError(
            f"{points.shape[0]} bins cannot determine {config.n_basis} control points"
        )
    ts = chord_length_parameterize(points)
    n = n_samples or SAMPLES_PER_BIN * hist.k_bins
    return _fit(points, ts, np.asarray(hist.probs), config, n)


def omega_grid(lo=DEFAULT_GRID[0], hi=DEFAULT_GRID[1], step=DEFAULT_GRID[2]):
    """Grid ``lo, lo + step, ...`` up to `hi` inclusive, rounded to 12 decimals."""
    if not (0.0 < lo <= hi < 1.0) or not step > 0.0:
        raise QuasiDistError(f"invalid omega grid lo={lo} hi={hi} step={step}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    grid = np.round(lo + step * np.arange(count), 12)
    if grid.size == 0:
        raise QuasiDistError("empty omega grid")
    return grid


def select_omega(hist, grid=DEFAULT_GRID, degree=5, n_samples=None, threads=1):
    """Scan the segmentation point over `grid` and keep the lowest-MSE fit.

    `grid` is either ``(lo, hi, step)`` or an explicit sequence of omegas.
    Rank-deficient fits score ``+inf``. Ties go to the smaller omega, and
    the result does not depend on `threads`.

    Returns
    -------
    omega : float
    fit : FittedCurve
    """
    if isinstance(grid, tuple) and len(grid) == 3:
        omegas = omega_grid(*grid)
    else:
        omegas = np.sort(np.asarray(grid, dtype=np.float64))
    if omegas.size == 0:
        raise QuasiDistError("empty omega grid")

    points = histogram_points(hist)
    ts = chord_length_parameterize(points)
    probs = np.asarray(hist.probs)
    n = n_samples or SAMPLES_PER_BIN * hist.k_bins

    def run(w):
        try:
            return _fit(points, ts, probs, BasisConfig(degree, float(w)), n)
        except NumericError:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fits = list(pool.map(run, omegas))
    else:
        fits = [run(w) for w in omegas]

    best = None
    best_score = np.inf
    for fit in fits:
        if fit is None or fit.condition_flag or not np.isfinite(fit.mse):
            continue
        if fit.mse < best_score:
            best, best_score = fit, fit.mse
    if best is None:
        raise NumericError("no admissible segmentation point on the grid")
    return best.omega, best
