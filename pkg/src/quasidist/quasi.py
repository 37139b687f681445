"""Area normalization, variance scoring and ranking of design cases."""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, QuasiDistError
from .fitting import DEFAULT_GRID, SAMPLES_PER_BIN, SampledSignal, fit_curve, select_omega
from .histogram import DEFAULT_BINS, build_histogram
from .ingest import field_magnitudes

SUMMARY_COLUMNS = (
    "case_id", "n_total", "zero_fraction", "omega", "mse", "gamma",
    "variance_index", "variance_physical", "warnings",
)


@dataclass(frozen=True, eq=False)
class QuasiDistribution:
    """Unit-area density on bin indices ``1..K``.

    `v_min` and `xi` map index ``k`` to the physical bin centre
    ``v_min + (k - 1/2) xi``.
    """

    gamma: float
    density: np.ndarray
    negative_mass: float
    v_min: float = 0.0
    xi: float = 1.0

    @property
    def k_bins(self):
        return int(self.density.shape[0])


@dataclass
class FitConfig:
    bins: int = DEFAULT_BINS
    degree: int = 5
    omega: float = None
    grid: tuple = DEFAULT_GRID
    samples: int = None
    zero_policy: str = "include"
    threads: int = 1

    def __post_init__(self):
        if int(self.bins) != self.bins or self.bins < 2:
            raise QuasiDistError(f"bins must be an integer >= 2, got {self.bins}")
        if int(self.degree) != self.degree or self.degree < 1:
            raise QuasiDistError(f"degree must be an integer >= 1, got {self.degree}")
        if self.bins < 2 * self.degree + 1:
            raise QuasiDistError(f"bins={self.bins} is fewer than the {2 * self.degree + 1} basis functions")
        if self.omega is not None and not 0.0 < self.omega < 1.0:
            raise QuasiDistError(f"omega must lie in (0, 1), got {self.omega}")
        lo, hi, step = self.grid
        if not (0.0 < lo <= hi < 1.0 and step > 0.0):
            raise QuasiDistError(f"invalid grid {self.grid}")
        if self.samples is not None and self.samples < 1:
            raise QuasiDistError(f"samples must be >= 1, got {self.samples}")
        if self.threads < 1:
            raise QuasiDistError(f"threads must be >= 1, got {self.threads}")
        self.grid = tuple(float(g) for g in self.grid)

    @property
    def n_samples(self):
        return self.samples or SAMPLES_PER_BIN * self.bins


@dataclass
class FitReport:
    case_id: str
    n_total: int
    zero_fraction: float
    omega: float
    mse: float
    gamma: float
    variance: float
    mean: float
    variance_physical: float
    mean_physical: float
    signal_value_variance: float
    negative_mass: float
    v_min: float
    v_max: float
    xi: float
    warnings: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    signal: list = field(default_factory=list)
    density: list = field(default_factory=list)

    def to_dict(self):
        return {
            "case_id": self.case_id,
            "n_total": self.n_total,
            "zero_fraction": self.zero_fraction,
            "omega": self.omega,
            "mse": self.mse,
            "gamma": self.gamma,
            "variance": self.variance,
            "mean": self.mean,
            "variance_physical": self.variance_physical,
            "mean_physical": self.mean_physical,
            "signal_value_variance": self.signal_value_variance,
            "negative_mass": self.negative_mass,
            "v_min": self.v_min,
            "v_max": self.v_max,
            "xi": self.xi,
            "warnings": list(self.warnings),
            "config": dict(self.config),
            "signal": list(self.signal),
            "density": list(self.density),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data):
        return cls(**{k: data[k] for k in cls.__dataclass_fields__})

    def summary_row(self):
        values = (
            self.case_id, str(self.n_total), repr(self.zero_fraction), repr(self.omega),
            repr(self.mse), repr(self.gamma), repr(self.variance),
            repr(self.variance_physical), ";".join(self.warnings),
        )
        return ",".join(values)

    def summary_csv(self):
        return ",".join(SUMMARY_COLUMNS) + "\n" + self.summary_row() + "\n"


def _values(signal):
    if isinstance(signal, SampledSignal):
        return np.asarray(signal.values, dtype=np.float64)
    return np.asarray(signal, dtype=np.float64)


def curve_area(signal):
    """Trapezoid area under the signal over indices ``1..K`` (unit spacing)."""
    y = _values(signal)
    if y.shape[0] < 2:
        raise QuasiDistError("signal needs at least 2 values")
    return float(y.sum() - 0.5 * (y[0] + y[-1]))


def normalize(signal, v_min=0.0, xi=1.0):
    """Clip negative values, then scale the signal to unit trapezoid area.

    Raises
    ------
    NumericError
        If nothing positive remains after clipping.
    """
    y = _values(signal)
    negative_mass = float(-y[y < 0.0].sum())
    clipped = np.maximum(y, 0.0)
    area = curve_area(clipped)
    if not area > 0.0:
        raise NumericError("fitted curve has no positive area")
    gamma = 1.0 / area
    density = gamma * clipped
    density.setflags(write=False)
    return QuasiDistribution(gamma=gamma, density=density, negative_mass=negative_mass,
                             v_min=v_min, xi=xi)


def distribution_moments(qd):
    """Mean and variance of the density treated as masses at ``k = 1..K``."""
    p = qd.density
    w = p / p.sum()
    x = np.arange(1, p.shape[0] + 1, dtype=np.float64)
    mu = float(w @ x)
    var = float(w @ (x - mu) ** 2)
    return mu, var


def distribution_variance(qd):
    """Second central moment of the quasi-distribution in bin-index units."""
    return distribution_moments(qd)[1]


def evaluate_case(field, config=None):
    """Run the full pipeline on one displacement field and return its report.

    Errors from any stage are re-raised with the case id prefixed.
    """
    return evaluate_case_detail(field, config)[0]


def evaluate_case_detail(field, config=None):
    """Like :func:`evaluate_case` but also returns the histogram and fit."""
    config = config or FitConfig()
    try:
        mags = field_magnitudes(field)
        hist = build_histogram(mags, config.bins, config.zero_policy, case_id=field.case_id)
        if config.omega is None:
            _, fit = select_omega(hist, config.grid, config.degree, config.n_samples,
                                  threads=config.threads)
        else:
            fit = fit_curve(hist, config.omega, config.degree, config.n_samples)
        qd = normalize(fit.signal, hist.v_min, hist.xi)
    except QuasiDistError as exc:
        raise type(exc)(f"case {field.case_id}: {exc}") from exc
    return _report(field.case_id, hist, fit, qd, config), hist, fit


def _report(case_id, hist, fit, qd, config):
    mu, var = distribution_moments(qd)
    warnings = []
    if fit.condition_flag:
        warnings.append("rank_deficient")
    if fit.nonmonotone:
        warnings.append("nonmonotone_x")
    if qd.negative_mass > 0.0:
        warnings.append("negative_clipped")
    return FitReport(
        case_id=case_id,
        n_total=hist.n_total,
        zero_fraction=hist.zero_fraction,
        omega=float(fit.omega),
        mse=fit.mse,
        gamma=qd.gamma,
        variance=var,
        mean=mu,
        variance_physical=var * hist.xi ** 2,
        mean_physical=hist.v_min + (mu - 0.5) * hist.xi,
        signal_value_variance=float(np.var(qd.density)),
        negative_mass=qd.negative_mass,
        v_min=hist.v_min,
        v_max=hist.v_max,
        xi=hist.xi,
        warnings=warnings,
        config={
            "k_bins": config.bins,
            "degree": config.degree,
            "omega": "auto" if config.omega is None else config.omega,
            "grid": list(config.grid),
            "samples": config.n_samples,
            "zero_policy": config.zero_policy,
        },
        signal=fit.signal.values.tolist(),
        density=qd.density.tolist(),
    )


def evaluate_cases(fields, config=None, threads=1):
    """Evaluate several fields; output order follows input order."""
    config = config or FitConfig()

    def run(f):
        return evaluate_case(f, config)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, fields))
    return [run(f) for f in fields]


def rank_cases(reports):
    """Sort reports by ascending variance, ties by case id. First is best."""
    reports = list(reports)
    if not reports:
        raise QuasiDistError("nothing to rank")
    return sorted(reports, key=lambda r: (r.variance, r.case_id))


def ranking_csv(ranked):
    lines = ["rank," + ",".join(SUMMARY_COLUMNS)]
    for i, r in enumerate(ranked, start=1):
        lines.append(f"{i},{r.summary_row()}")
    return "\n".join(lines) + "\n"
