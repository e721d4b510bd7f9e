"""Hand-built SVG line charts of sweep reports, plus a tidy point CSV.

One polyline per classifier (``class="series"``), one vertical +/-1-std error
bar per (classifier, fraction) cell (``class="errbar"``), and a legend entry
per classifier.  Accuracy is plotted in percent; AUC as-is.
"""

from __future__ import annotations

from pathlib import Path

from .errors import IoFailure
from .evaluation import EvalReport

METRICS = ("accuracy", "auc")

PLOT_CSV_HEADER = ("classifier", "fraction", "mean", "std")

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#bcbd22", "#e377c2", "#7f7f7f")

_WIDTH = 760.0
_HEIGHT = 480.0
_MARGIN_LEFT = 70.0
_MARGIN_RIGHT = 190.0
_MARGIN_TOP = 40.0
_MARGIN_BOTTOM = 55.0


def metric_series(report: EvalReport, metric: str
                  ) -> list[tuple[str, list[tuple[float, float, float]]]]:
    """Per classifier: fraction-sorted (fraction, mean, std) points.

    Accuracy values (means and stds) are scaled to percent.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of "
                         f"{METRICS}")
    scale = 100.0 if metric == "accuracy" else 1.0
    series = []
    for kind in report.classifiers():
        points = []
        for cell in report.cells:
            if cell.classifier != kind:
                continue
            if metric == "accuracy":
                mean, std = cell.mean_accuracy, cell.std_accuracy
            else:
                mean, std = cell.mean_auc, cell.std_auc
            points.append((cell.train_fraction, mean * scale, std * scale))
        points.sort(key=lambda p: p[0])
        series.append((kind, points))
    return series


def _spread(lo: float, hi: float, pad_frac: float = 0.06
            ) -> tuple[float, float]:
    if hi <= lo:
        return lo - 1.0, hi + 1.0
    pad = (hi - lo) * pad_frac
    return lo - pad, hi + pad


def render_line_chart(report: EvalReport, metric: str) -> str:
    """Self-contained SVG text for one metric of a sweep report."""
    series = metric_series(report, metric)
    fractions = sorted({p[0] for _, points in series for p in points})
    lows = [p[1] - p[2] for _, points in series for p in points]
    highs = [p[1] + p[2] for _, points in series for p in points]
    x_lo, x_hi = _spread(min(fractions), max(fractions), 0.04)
    y_lo, y_hi = _spread(min(lows), max(highs))

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(value: float) -> float:
        return _MARGIN_LEFT + (value - x_lo) / (x_hi - x_lo) * plot_w

    def sy(value: float) -> float:
        return _MARGIN_TOP + (y_hi - value) / (y_hi - y_lo) * plot_h

    y_label = "accuracy (%)" if metric == "accuracy" else "AUC"
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:.0f}" '
        f'height="{_HEIGHT:.0f}" viewBox="0 0 {_WIDTH:.0f} {_HEIGHT:.0f}">',
        f'<rect width="{_WIDTH:.0f}" height="{_HEIGHT:.0f}" fill="white"/>',
        f'<text x="{_MARGIN_LEFT + plot_w / 2:.2f}" y="24" '
        f'text-anchor="middle" font-size="16" font-family="sans-serif">'
        f'{y_label} vs train fraction</text>',
    ]

    # axes
    x_axis_y = _MARGIN_TOP + plot_h
    parts.append(f'<line class="axis" x1="{_MARGIN_LEFT:.2f}" '
                 f'y1="{x_axis_y:.2f}" x2="{_MARGIN_LEFT + plot_w:.2f}" '
                 f'y2="{x_axis_y:.2f}" stroke="black"/>')
    parts.append(f'<line class="axis" x1="{_MARGIN_LEFT:.2f}" '
                 f'y1="{_MARGIN_TOP:.2f}" x2="{_MARGIN_LEFT:.2f}" '
                 f'y2="{x_axis_y:.2f}" stroke="black"/>')

    for fraction in fractions:
        x = sx(fraction)
        parts.append(f'<line class="tick" x1="{x:.2f}" y1="{x_axis_y:.2f}" '
                     f'x2="{x:.2f}" y2="{x_axis_y + 5:.2f}" stroke="black"/>')
        parts.append(f'<text class="ticklabel" x="{x:.2f}" '
                     f'y="{x_axis_y + 20:.2f}" text-anchor="middle" '
                     f'font-size="11" font-family="sans-serif">'
                     f'{fraction:g}</text>')
    n_y_ticks = 6
    for i in range(n_y_ticks):
        value = y_lo + (y_hi - y_lo) * i / (n_y_ticks - 1)
        y = sy(value)
        parts.append(f'<line class="tick" x1="{_MARGIN_LEFT - 5:.2f}" '
                     f'y1="{y:.2f}" x2="{_MARGIN_LEFT:.2f}" y2="{y:.2f}" '
                     f'stroke="black"/>')
        parts.append(f'<text class="ticklabel" x="{_MARGIN_LEFT - 9:.2f}" '
                     f'y="{y + 4:.2f}" text-anchor="end" font-size="11" '
                     f'font-family="sans-serif">{value:.3g}</text>')
    parts.append(f'<text x="{_MARGIN_LEFT + plot_w / 2:.2f}" '
                 f'y="{_HEIGHT - 12:.2f}" text-anchor="middle" '
                 f'font-size="13" font-family="sans-serif">train fraction'
                 f'</text>')
    parts.append(f'<text x="18" y="{_MARGIN_TOP + plot_h / 2:.2f}" '
                 f'text-anchor="middle" font-size="13" '
                 f'font-family="sans-serif" transform="rotate(-90 18 '
                 f'{_MARGIN_TOP + plot_h / 2:.2f})">{y_label}</text>')

    # error bars first so series lines draw over them
    for index, (kind, points) in enumerate(series):
        color = _PALETTE[index % len(_PALETTE)]
        for fraction, mean, std in points:
            x = sx(fraction)
            parts.append(f'<line class="errbar" x1="{x:.2f}" '
                         f'y1="{sy(mean - std):.2f}" x2="{x:.2f}" '
                         f'y2="{sy(mean + std):.2f}" stroke="{color}" '
                         f'stroke-width="1"/>')
    for index, (kind, points) in enumerate(series):
        color = _PALETTE[index % len(_PALETTE)]
        coords = " ".join(f"{sx(f):.2f},{sy(m):.2f}" for f, m, _ in points)
        parts.append(f'<polyline class="series" points="{coords}" '
                     f'fill="none" stroke="{color}" stroke-width="1.8"/>')
        for fraction, mean, _ in points:
            parts.append(f'<circle class="marker" cx="{sx(fraction):.2f}" '
                         f'cy="{sy(mean):.2f}" r="2.6" fill="{color}"/>')

    # legend
    legend_x = _MARGIN_LEFT + plot_w + 18
    parts.append('<g class="legend">')
    for index, (kind, _) in enumerate(series):
        color = _PALETTE[index % len(_PALETTE)]
        y = _MARGIN_TOP + 14 + index * 20
        parts.append(f'<line x1="{legend_x:.2f}" y1="{y:.2f}" '
                     f'x2="{legend_x + 22:.2f}" y2="{y:.2f}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text class="legend-entry" x="{legend_x + 28:.2f}" '
                     f'y="{y + 4:.2f}" font-size="12" '
                     f'font-family="sans-serif">{kind}</text>')
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(report: EvalReport, metric: str, path: str | Path) -> None:
    try:
        Path(path).write_text(render_line_chart(report, metric),
                              encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_plot_csv(report: EvalReport, metric: str, path: str | Path) -> None:
    """The plotted points (post-scaling) as classifier,fraction,mean,std."""
    lines = [",".join(PLOT_CSV_HEADER)]
    for kind, points in metric_series(report, metric):
        for fraction, mean, std in points:
            lines.append(f"{kind},{fraction!r},{mean!r},{std!r}")
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
