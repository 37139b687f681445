"""Independent reference computations used only by the tests."""

import math

import numpy as np


def de_casteljau(controls, s):
    pts = [np.asarray(c, dtype=float) for c in controls]
    while len(pts) > 1:
        pts = [(1 - s) * a + s * b for a, b in zip(pts[:-1], pts[1:])]
    return pts[0]


def piecewise_oracle(controls, omega, t):
    """Evaluate the two-segment curve by de Casteljau on each segment."""
    d = (len(controls) - 1) // 2
    if t < omega:
        return de_casteljau(controls[: d + 1], t / omega)
    return de_casteljau(controls[d:], (t - omega) / (1 - omega))


def bernstein(d, i, s):
    return math.comb(d, i) * (1 - s) ** (d - i) * s ** i


def brute_variance(density):
    p = [float(v) for v in density]
    total = math.fsum(p)
    w = [v / total for v in p]
    mu = math.fsum(wk * (k + 1) for k, wk in enumerate(w))
    return math.fsum(wk * ((k + 1) - mu) ** 2 for k, wk in enumerate(w))


def brute_max_below(xs, ys, k_bins):
    """O(n K) scan of the max-below rule, last sample wins ties."""
    out = []
    for k in range(1, k_bins + 1):
        best = None
        for j, x in enumerate(xs):
            if x < k and (best is None or x >= xs[best]):
                best = j
        out.append(best)
    return out


def hand_histogram(values, k_bins):
    lo, hi = min(values), max(values)
    width = (hi - lo) / k_bins
    counts = [0] * k_bins
    for v in values:
        k = k_bins - 1 if v == hi else int((v - lo) // width)
        counts[min(k, k_bins - 1)] += 1
    return [c / len(values) for c in counts]


def linear_curve_controls(omega, ys, k_bins, degree=5):
    """Controls whose x runs linearly in t from 1 to k_bins."""
    xm = 1 + (k_bins - 1) * omega
    xs = np.r_[np.linspace(1, xm, degree + 1), np.linspace(xm, k_bins, degree + 1)[1:]]
    return np.column_stack([xs, ys])
