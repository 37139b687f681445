"""Compare the compiled and numpy kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat 20]

Times the two hot kernels on the shapes used by one omega-grid step (a
5601 x 11 curve-sample basis and a 5601-sample resample onto 350 bins) and
a full 451-point omega scan on a 5000-node synthetic case.
"""

import argparse
import timeit

import numpy as np

from quasidist import _pykernels, fitting, kernels
from quasidist.histogram import build_histogram
from quasidist.ingest import field_magnitudes
from quasidist.synth import SynthSpec, Uniform, generate_field

try:
    from quasidist import _ckernels
except ImportError:
    _ckernels = None


def _use(mod):
    kernels.basis_matrix = mod.basis_matrix
    kernels.resample_max_below = mod.resample_max_below


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled extension not available; timing the fallback only")

    ts = np.arange(5601) / 5600
    rng = np.random.default_rng(0)
    x = 1 + 349 * ts + rng.normal(0, 0.01, ts.size)
    y = rng.uniform(size=ts.size)
    hist = build_histogram(field_magnitudes(generate_field(SynthSpec(5000, Uniform(0.2, 1), 0.02, 1))))

    rows = []
    for name, mod in backends:
        _use(mod)
        t_basis = min(timeit.repeat(lambda: mod.basis_matrix(ts, 0.608, 5), number=10, repeat=args.repeat)) / 10
        t_res = min(timeit.repeat(lambda: mod.resample_max_below(x, y, 350), number=10, repeat=args.repeat)) / 10
        t_scan = min(timeit.repeat(lambda: fitting.select_omega(hist), number=1, repeat=max(3, args.repeat // 5)))
        rows.append((name, t_basis, t_res, t_scan))

    print(f"{'backend':<8} {'basis 5601x11':>14} {'resample':>10} {'omega scan':>11}")
    for name, tb, tr, ts_ in rows:
        print(f"{name:<8} {tb * 1e6:>11.1f} us {tr * 1e6:>7.1f} us {ts_ * 1e3:>8.1f} ms")
    if len(rows) == 2:
        p, c = rows
        print(f"speedup  {p[1] / c[1]:>13.1f}x {p[2] / c[2]:>9.1f}x {p[3] / c[3]:>10.1f}x")


if __name__ == "__main__":
    main()
