"""Synthetic displacement fields and curve-derived histograms.

Random numbers
--------------
All draws come from SplitMix64 (Steele, Lea & Flood 2014). With 64-bit
wrapping arithmetic and ``G = 0x9E3779B97F4A7C15`` the ``i``-th output
(``i = 0, 1, ...``) for seed ``s`` is ``mix(s + (i + 1) * G)`` where::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)

A uniform on the open interval (0, 1) is ``((z >> 11) + 0.5) / 2**53``.

For a field of ``n`` nodes the stream is consumed in four blocks:

* outputs ``2i`` and ``2i + 1``: component choice and value uniform of node
  ``i`` (all laws consume both);
* outputs ``2n + i``: zero-selection key of node ``i``; the
  ``floor(zero_fraction * n)`` nodes with the smallest keys (ties by index)
  are set to exact zero;
* outputs ``3n + i``: the top three bits give the signs of ux, uy, uz
  (bit set means negative).

Magnitudes use inverse-CDF sampling, so every node consumes a fixed number
of draws. Gaussian mixture components are truncated at zero.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .bezier import curve_sample
from .errors import NumericError, QuasiDistError
from .fitting import SAMPLES_PER_BIN, resample_to_signal
from .histogram import HistogramDistribution
from .ingest import DisplacementField

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed, start, count):
    """Outputs ``start .. start + count - 1`` of the SplitMix64 stream."""
    seed = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
    i = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = seed + i * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(seed, start, count):
    z = splitmix64(seed, start, count)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not 0.0 <= self.a < self.b:
            raise QuasiDistError(f"uniform law needs 0 <= a < b, got ({self.a}, {self.b})")

    def sample(self, u_comp, u_val):
        return self.a + (self.b - self.a) * u_val


@dataclass(frozen=True)
class GaussianMixture:
    means: tuple
    sigmas: tuple
    weights: tuple

    def __post_init__(self):
        n = len(self.means)
        if n == 0 or len(self.sigmas) != n or len(self.weights) != n:
            raise QuasiDistError("mixture needs equally many means, sigmas and weights")
        if any(s <= 0 for s in self.sigmas):
            raise QuasiDistError("mixture sigmas must be positive")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-9:
            raise QuasiDistError("mixture weights must be nonnegative and sum to 1")

    def sample(self, u_comp, u_val):
        means = np.asarray(self.means, dtype=np.float64)
        sigmas = np.asarray(self.sigmas, dtype=np.float64)
        cum = np.cumsum(self.weights)
        comp = np.minimum(np.searchsorted(cum, u_comp, side="right"), len(cum) - 1)
        mu, sd = means[comp], sigmas[comp]
        lower = ndtr(-mu / sd)
        z = ndtri(lower + u_val * (1.0 - lower))
        return np.maximum(mu + sd * z, 0.0)


@dataclass(frozen=True)
class LogNormal:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise QuasiDistError("lognormal sigma must be positive")

    def sample(self, u_comp, u_val):
        return np.exp(self.mu + self.sigma * ndtri(u_val))


@dataclass(frozen=True)
class SynthSpec:
    n_nodes: int
    law: object
    zero_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 2:
            raise QuasiDistError(f"n_nodes must be an integer >= 2, got {self.n_nodes}")
        if not 0.0 <= self.zero_fraction < 1.0:
            raise QuasiDistError(f"zero_fraction must lie in [0, 1), got {self.zero_fraction}")
        if not hasattr(self.law, "sample"):
            raise QuasiDistError(f"unknown magnitude law {self.law!r}")


def parse_law(text):
    """Parse ``uniform:a,b``, ``lognormal:mu,sigma`` or
    ``gaussian_mixture:m1,s1,w1,m2,s2,w2,...``."""
    name, _, args = text.partition(":")
    try:
        vals = [float(v) for v in args.split(",")] if args else []
    except ValueError:
        raise QuasiDistError(f"bad law parameters in {text!r}") from None
    if name == "uniform" and len(vals) == 2:
        return Uniform(*vals)
    if name == "lognormal" and len(vals) == 2:
        return LogNormal(*vals)
    if name == "gaussian_mixture" and vals and len(vals) % 3 == 0:
        return GaussianMixture(tuple(vals[0::3]), tuple(vals[1::3]), tuple(vals[2::3]))
    raise QuasiDistError(f"cannot parse magnitude law {text!r}")


def generate_magnitudes(spec):
    """Per-node magnitudes (zeros already applied) and sign bits."""
    n = spec.n_nodes
    u = uniforms(spec.seed, 0, 2 * n)
    mags = np.asarray(spec.law.sample(u[0::2], u[1::2]), dtype=np.float64)

    n_zero = int(np.floor(spec.zero_fraction * n))
    if n_zero:
        keys = uniforms(spec.seed, 2 * n, n)
        mags[np.argsort(keys, kind="stable")[:n_zero]] = 0.0

    signs = (splitmix64(spec.seed, 3 * n, n) >> np.uint64(61)).astype(np.int64)
    return mags, signs


def generate_field(spec, case_id="synthetic"):
    """Displacement field whose node 1-norms are draws from `spec.law`.

    Each magnitude ``m`` is split into ``(+-m/3, +-m/3, +-m/3)``.
    """
    mags, signs = generate_magnitudes(spec)
    third = mags / 3.0
    disp = np.empty((spec.n_nodes, 3))
    for axis in range(3):
        neg = (signs >> axis) & 1
        disp[:, axis] = np.where(neg == 1, -third, third)
    ids = np.arange(1, spec.n_nodes + 1, dtype=np.int64)
    return DisplacementField(case_id, ids, disp)


def law_bin_probabilities(law, edges):
    """Exact probability mass of `law` in each interval of `edges`."""
    edges = np.asarray(edges, dtype=np.float64)
    if isinstance(law, Uniform):
        cdf = np.clip((edges - law.a) / (law.b - law.a), 0.0, 1.0)
    elif isinstance(law, LogNormal):
        with np.errstate(divide="ignore"):
            cdf = np.where(edges > 0, ndtr((np.log(np.maximum(edges, 1e-300)) - law.mu) / law.sigma), 0.0)
    else:
        cdf = np.zeros_like(edges)
        for m, s, w in zip(law.means, law.sigmas, law.weights):
            lower = ndtr(-m / s)
            part = (ndtr((edges - m) / s) - lower) / (1.0 - lower)
            cdf += w * np.clip(part, 0.0, 1.0)
    return np.diff(cdf)


def generate_from_curve(curve, k_bins, n_samples=None, case_id="from_curve"):
    """Histogram whose probabilities are the curve's resampled signal.

    The signal is clipped at zero and divided by its sum. The result has no
    underlying nodes: ``n_total = 0`` and the bins are the index range
    ``[0, k_bins]`` with unit width.
    """
    n = n_samples or SAMPLES_PER_BIN * k_bins
    signal = resample_to_signal(curve_sample(curve, n), k_bins).values
    clipped = np.maximum(signal, 0.0)
    total = clipped.sum()
    if not total > 0.0:
        raise NumericError("curve signal has no positive mass")
    probs = clipped / total
    probs.setflags(write=False)
    return HistogramDistribution(
        k_bins=k_bins, v_min=0.0, v_max=float(k_bins), xi=1.0, probs=probs,
        n_total=0, n_counted=0, zero_fraction=0.0, case_id=case_id,
    )
