"""SVG overlay of a histogram and its fitted signal."""

from xml.sax.saxutils import escape

import numpy as np

from .errors import ParseError

WIDTH, HEIGHT = 800, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 50


def _nice_ticks(lo, hi, count=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(v) + 0.0 for v in np.arange(start, hi + 0.5 * step, step) if v <= hi + 1e-12]


def check_pair(report, hist_case_id, probs):
    if hist_case_id is not None and hist_case_id != report.case_id:
        raise ParseError(
            f"histogram belongs to case {hist_case_id!r}, report to {report.case_id!r}"
        )
    if len(probs) != len(report.signal):
        raise ParseError(
            f"histogram has {len(probs)} bins but the report signal has {len(report.signal)}"
        )


def plot_csv(report, probs):
    lines = ["k,prob,fit"]
    for k, (p, f) in enumerate(zip(probs, report.signal), start=1):
        lines.append(f"{k},{float(p)!r},{float(f)!r}")
    return "\n".join(lines) + "\n"


def render_svg(report, probs):
    """Histogram (red) and fitted signal (blue) on shared axes."""
    probs = np.asarray(probs, dtype=np.float64)
    fit = np.asarray(report.signal, dtype=np.float64)
    k = np.arange(1, probs.shape[0] + 1)
    y_hi = float(max(probs.max(), fit.max(), 0.0)) * 1.05 or 1.0
    y_lo = float(min(fit.min(), 0.0))
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - 1) / max(k[-1] - 1, 1) * pw

    def sy(y):
        return TOP + (y_hi - y) / (y_hi - y_lo) * ph

    def points(ys):
        return " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(k, ys))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f"<title>{escape(report.case_id)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>',
    ]
    for t in _nice_ticks(1, int(k[-1])):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{TOP + ph}" x2="{x:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        y = sy(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    out += [
        f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">bin index k</text>',
        f'<polyline class="histogram" fill="none" stroke="red" stroke-width="1" points="{points(probs)}"/>',
        f'<polyline class="fit" fill="none" stroke="blue" stroke-width="1.5" points="{points(fit)}"/>',
        f'<text class="zero" x="{LEFT + pw - 5}" y="{TOP + 15}" text-anchor="end">'
        f"zero = {report.zero_fraction:.4f}</text>",
        f'<text x="{LEFT + 5}" y="{TOP - 12}">{escape(report.case_id)}: omega = {report.omega:.3f}, '
        f"variance = {report.variance:.2f}</text>",
        "</svg>",
    ]
    return "\n".join(out) + "\n"
