"""Command-line interface.

Commands::

    quasidist fit   INPUT.csv [options]
    quasidist rank  A.csv B.csv ... [options]
    quasidist plot  --report R.report.json --histogram R.histogram.csv --output R.svg
    quasidist synth --n 5000 --law uniform:0,1 --seed 7 --output case.csv

Exit codes: 0 success, 1 usage or I/O error, 2 parse error, 3 numeric error.
Fit options may also come from a ``key=value`` file given with ``--config``;
command-line flags take precedence.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import NumericError, ParseError, QuasiDistError
from .histogram import format_histogram_csv, parse_histogram_csv
from .ingest import format_displacement_csv, read_displacement_csv
from .plot import check_pair, plot_csv, render_svg
from .quasi import FitConfig, FitReport, evaluate_case_detail, rank_cases, ranking_csv
from .synth import SynthSpec, generate_field, parse_law

log = logging.getLogger("quasidist")

EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 1, 2, 3

RUN_DEFAULTS = {
    "bins": 350,
    "degree": 5,
    "omega": "auto",
    "grid_lo": 0.05,
    "grid_hi": 0.95,
    "grid_step": 0.002,
    "samples": None,
    "zero_policy": "include",
    "output_dir": ".",
    "threads": 1,
}
_CONVERTERS = {
    "bins": int, "degree": int, "grid_lo": float, "grid_hi": float,
    "grid_step": float, "samples": int, "threads": int, "omega": str,
    "zero_policy": str, "output_dir": str,
}


class UsageError(QuasiDistError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_config_file(path):
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in RUN_DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown or malformed setting {line!r}")
        try:
            values[key] = _CONVERTERS[key](value.strip())
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}") from None
    return values


def _add_run_options(p):
    g = p.add_argument_group("fit options")
    g.add_argument("--bins", type=int, help="histogram bin count (default 350)")
    g.add_argument("--degree", type=int, help="Bezier degree per segment (default 5)")
    g.add_argument("--omega", help="'auto' for grid search or a fixed value in (0, 1)")
    g.add_argument("--grid-lo", type=float, help="omega grid start (default 0.05)")
    g.add_argument("--grid-hi", type=float, help="omega grid end (default 0.95)")
    g.add_argument("--grid-step", type=float, help="omega grid step (default 0.002)")
    g.add_argument("--samples", type=int, help="curve samples n (default 16 * bins)")
    g.add_argument("--zero-policy", choices=("include", "exclude"))
    g.add_argument("--output-dir", help="directory for result files (default .)")
    g.add_argument("--threads", type=int, help="worker threads (default 1)")
    g.add_argument("--config", help="key=value settings file")


def _run_settings(args):
    settings = dict(RUN_DEFAULTS)
    if args.config:
        settings.update(read_config_file(args.config))
    for key in RUN_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    omega = settings["omega"]
    if omega in (None, "auto"):
        omega = None
    else:
        try:
            omega = float(omega)
        except ValueError:
            raise UsageError(f"--omega must be 'auto' or a number, got {omega!r}") from None
    config = FitConfig(
        bins=settings["bins"],
        degree=settings["degree"],
        omega=omega,
        grid=(settings["grid_lo"], settings["grid_hi"], settings["grid_step"]),
        samples=settings["samples"],
        zero_policy=settings["zero_policy"],
        threads=settings["threads"],
    )
    out = Path(settings["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return config, out, settings["threads"]


def _write_case(out, report, hist):
    stem = out / report.case_id
    Path(f"{stem}.report.json").write_text(report.to_json())
    Path(f"{stem}.summary.csv").write_text(report.summary_csv())
    Path(f"{stem}.histogram.csv").write_text(format_histogram_csv(hist))


def _load(path, case_id=None):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    try:
        return read_displacement_csv(path, case_id=case_id)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def cmd_fit(args):
    config, out, _ = _run_settings(args)
    field = _load(args.input, args.case_id)
    report, hist, _ = evaluate_case_detail(field, config)
    _write_case(out, report, hist)
    print(f"{report.case_id}: omega={report.omega:.3f} mse={report.mse:.6g} "
          f"variance={report.variance:.6g}")
    return 0


def cmd_rank(args):
    from concurrent.futures import ThreadPoolExecutor

    config, out, threads = _run_settings(args)
    # case-level parallelism only; each omega scan runs serially
    config.threads = 1

    def run(path):
        try:
            field = _load(path)
            return evaluate_case_detail(field, config)
        except (QuasiDistError, OSError) as exc:
            if not args.skip_errors:
                raise
            log.warning("skipping %s: %s", path, exc)
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, args.inputs))
    else:
        results = [run(p) for p in args.inputs]

    results = [r for r in results if r is not None]
    if not results:
        raise NumericError("no case could be evaluated")
    for report, hist, _ in results:
        _write_case(out, report, hist)
    ranked = rank_cases(r[0] for r in results)
    (out / "ranking.csv").write_text(ranking_csv(ranked))
    print(f"best case: {ranked[0].case_id} (variance {ranked[0].variance:.6g})")
    return 0


def cmd_plot(args):
    for p in (args.report, args.histogram):
        if not Path(p).is_file():
            raise FileNotFoundError(f"input file not found: {p}")
    try:
        report = FitReport.from_dict(json.loads(Path(args.report).read_text()))
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"cannot read report {args.report}: {exc}") from None
    case_id, _, _, probs = parse_histogram_csv(Path(args.histogram).read_text())
    check_pair(report, case_id, probs)
    svg_path = Path(args.output)
    svg_path.parent.mkdir(parents=True, exist_ok=True)
    svg_path.write_text(render_svg(report, probs))
    csv_path = Path(args.csv) if args.csv else svg_path.parent / "plot.csv"
    csv_path.write_text(plot_csv(report, probs))
    return 0


def cmd_synth(args):
    spec = SynthSpec(
        n_nodes=args.n,
        law=parse_law(args.law),
        zero_fraction=args.zero_fraction,
        seed=args.seed,
    )
    field = generate_field(spec, case_id=Path(args.output).stem)
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    Path(args.output).write_text(format_displacement_csv(field))
    return 0


def build_parser():
    parser = _Parser(prog="quasidist", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="evaluate a single case")
    p.add_argument("input")
    p.add_argument("--case-id", help="override the case id (default: file stem)")
    _add_run_options(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("rank", help="evaluate and rank several cases")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--skip-errors", action="store_true",
                   help="drop failing cases instead of aborting")
    _add_run_options(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("plot", help="SVG of histogram and fitted signal")
    p.add_argument("--report", required=True)
    p.add_argument("--histogram", required=True)
    p.add_argument("--output", required=True, help="SVG file to write")
    p.add_argument("--csv", help="plot data file (default: plot.csv next to the SVG)")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("synth", help="write a synthetic displacement CSV")
    p.add_argument("--n", type=int, required=True, help="node count")
    p.add_argument("--law", required=True,
                   help="uniform:a,b | lognormal:mu,sigma | gaussian_mixture:m,s,w[,m,s,w...]")
    p.add_argument("--zero-fraction", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        log.error("%s", exc)
        return EXIT_PARSE
    except NumericError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except (QuasiDistError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
