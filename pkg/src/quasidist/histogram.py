"""Equal-width histogram distribution of deformation magnitudes."""

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParseError

DEFAULT_BINS = 350
ZERO_POLICIES = ("include", "exclude")


@dataclass(frozen=True, eq=False)
class HistogramDistribution:
    """Bin probabilities over ``[v_min, v_max]`` split into `k_bins` bins.

    `n_total` is the full node count of the field; `n_counted` is the number
    of magnitudes that entered the bins (smaller under ``exclude``).
    `zero_fraction` is always relative to the full field.
    """

    k_bins: int
    v_min: float
    v_max: float
    xi: float
    probs: np.ndarray
    n_total: int
    n_counted: int
    zero_fraction: float
    zero_policy: str = "include"
    case_id: str = "case"

    def bin_edges(self):
        edges = self.v_min + self.xi * np.arange(self.k_bins + 1)
        edges[-1] = self.v_max
        return edges


def build_histogram(mags, k_bins=DEFAULT_BINS, zero_policy="include", case_id="case"):
    """Histogram of 1-norm magnitudes.

    Bin ``k`` (1-based) covers ``[v_min + (k-1) xi, v_min + k xi)``; the last
    bin is closed on the right so ``v_max`` is counted.

    Raises
    ------
    NumericError
        If the magnitude range is degenerate or no magnitude survives the
        zero policy.
    """
    if zero_policy not in ZERO_POLICIES:
        raise ParseError(f"zero_policy must be one of {ZERO_POLICIES}, got {zero_policy!r}")
    if int(k_bins) != k_bins or k_bins < 2:
        raise NumericError(f"k_bins must be an integer >= 2, got {k_bins}")
    k_bins = int(k_bins)
    values = np.asarray(mags.values, dtype=np.float64)
    n_total = values.shape[0]
    if n_total == 0:
        raise NumericError("empty magnitude set")
    zero_fraction = mags.zero_count / n_total
    if zero_policy == "exclude":
        values = values[values != 0.0]
        if values.size == 0:
            raise NumericError("no nonzero magnitudes left after excluding zeros")

    v_min, v_max = float(values.min()), float(values.max())
    if not v_max > v_min:
        raise NumericError(f"degenerate magnitude range: v_min = v_max = {v_min}")
    xi = (v_max - v_min) / k_bins
    idx = np.floor((values - v_min) / xi).astype(np.int64)
    np.clip(idx, 0, k_bins - 1, out=idx)
    counts = np.bincount(idx, minlength=k_bins)
    probs = counts / values.size
    probs.setflags(write=False)
    return HistogramDistribution(
        k_bins=k_bins,
        v_min=v_min,
        v_max=v_max,
        xi=xi,
        probs=probs,
        n_total=n_total,
        n_counted=int(values.size),
        zero_fraction=zero_fraction,
        zero_policy=zero_policy,
        case_id=case_id,
    )


def histogram_points(hist):
    """Planar points ``(k, P_k)`` for ``k = 1..K``."""
    x = np.arange(1, hist.k_bins + 1, dtype=np.float64)
    return np.column_stack([x, hist.probs])


def format_histogram_csv(hist):
    """CSV with a ``# case_id=`` comment and ``bin_index,bin_lo,bin_hi,prob`` rows."""
    edges = hist.bin_edges()
    lines = [f"# case_id={hist.case_id}", "bin_index,bin_lo,bin_hi,prob"]
    for k in range(hist.k_bins):
        lines.append(f"{k + 1},{float(edges[k])!r},{float(edges[k + 1])!r},{float(hist.probs[k])!r}")
    return "\n".join(lines) + "\n"


def parse_histogram_csv(text):
    """Inverse of :func:`format_histogram_csv`.

    Returns ``(case_id, bin_lo, bin_hi, probs)``; `case_id` is None when
    the comment line is absent.
    """
    case_id = None
    rows = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("case_id="):
                case_id = body[len("case_id="):]
            continue
        if not header_seen:
            if line != "bin_index,bin_lo,bin_hi,prob":
                raise ParseError(f"unexpected histogram header {line!r}", lineno)
            header_seen = True
            continue
        parts = line.split(",")
        try:
            k = int(parts[0])
            lo, hi, p = (float(v) for v in parts[1:])
        except ValueError:
            raise ParseError(f"malformed histogram row {line!r}", lineno) from None
        if k != len(rows) + 1:
            raise ParseError(f"bin index {k} out of sequence", lineno)
        rows.append((lo, hi, p))
    if len(rows) < 2:
        raise ParseError("histogram needs at least 2 bins")
    arr = np.array(rows)
    return case_id, arr[:, 0], arr[:, 1], arr[:, 2]
