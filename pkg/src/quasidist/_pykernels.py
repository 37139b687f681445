"""Reference (uncompiled) implementations of the hot kernels.

Both functions mirror ``_ckernels.pyx`` exactly in semantics; the
compiled module is preferred when it is importable.
"""

import numpy as np
from scipy.special import comb


def basis_matrix(ts, omega, degree):
    """Piecewise Bernstein basis values, one row per parameter in `ts`.

    Columns ``0..degree-1`` live on ``[0, omega)``, column ``degree`` is the
    shared junction basis and columns ``degree+1..2*degree`` live on
    ``[omega, 1]``.
    """
    ts = np.asarray(ts, dtype=np.float64)
    d = int(degree)
    out = np.zeros((ts.shape[0], 2 * d + 1))
    binom = comb(d, np.arange(d + 1), exact=False)

    left = ts < omega
    s = ts[left] / omega
    s1 = 1.0 - s
    for i in range(d):
        out[left, i] = binom[i] * s1 ** (d - i) * s ** i
    out[left, d] = s ** d

    right = ~left
    tr = ts[right]
    v = (1.0 - tr) / (1.0 - omega)
    u = (tr - omega) / (1.0 - omega)
    out[right, d] = v ** d
    for j in range(1, d + 1):
        out[right, d + j] = binom[j] * v ** (d - j) * u ** j
    return out


def resample_max_below(x, y, k_bins):
    """For each k in 1..k_bins pick y of the sample with the largest x < k.

    Ties on x go to the last sample in input order. Returns ``(values,
    index)`` where ``index[k-1]`` is the chosen sample or -1 when no sample
    lies below k.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    k_bins = int(k_bins)
    # sample j is a candidate for every k >= floor(x_j) + 1
    k0 = np.floor(x) + 1.0
    keep = k0 <= k_bins
    idx = np.flatnonzero(keep)
    bucket = np.maximum(k0[keep], 1.0).astype(np.int64)

    best = np.full(k_bins + 1, -1, dtype=np.int64)
    if idx.size:
        # sort by (bucket, x, index); the last entry per bucket wins
        order = np.lexsort((idx, x[idx], bucket))
        b_sorted = bucket[order]
        last = np.flatnonzero(np.r_[b_sorted[1:] != b_sorted[:-1], True])
        best[b_sorted[last]] = idx[order[last]]

    # carry the most recent nonempty bucket forward
    filled = np.where(best >= 0, np.arange(k_bins + 1), 0)
    np.maximum.accumulate(filled, out=filled)
    chosen = np.where(best[filled] >= 0, best[filled], -1)[1:]
    values = np.where(chosen >= 0, y[np.maximum(chosen, 0)], np.nan)
    return values, chosen
