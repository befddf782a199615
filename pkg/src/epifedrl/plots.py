"""Minimal deterministic SVG line charts for run metrics.

Line charts only.  The output is plain SVG text with fixed-precision
coordinates and no timestamps, so identical inputs yield byte-identical
files (they are hashed in tests).
"""

from __future__ import annotations

from pathlib import Path

from .metrics import RoundRecord, read_metrics, series

WIDTH, HEIGHT = 640.0, 420.0
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 62.0, 16.0, 40.0, 46.0

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def render_line_chart(
    curves: dict[str, list[tuple[float, float]]],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    """Render named (x, y) series to a self-contained SVG string."""
    if not curves or all(len(pts) == 0 for pts in curves.values()):
        raise ValueError("nothing to plot: no data points")
    xs = [x for pts in curves.values() for x, _ in pts]
    ys = [y for pts in curves.values() for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    y_pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x: float) -> float:
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return MARGIN_TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0f}" height="{HEIGHT:.0f}" '
        f'viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}" font-family="sans-serif">',
        f'<rect width="{WIDTH:.0f}" height="{HEIGHT:.0f}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="15">{title}</text>',
    ]
    axis_y = MARGIN_TOP + plot_h
    parts.append(
        f'<line x1="{_fmt(MARGIN_LEFT)}" y1="{_fmt(axis_y)}" x2="{_fmt(MARGIN_LEFT + plot_w)}" '
        f'y2="{_fmt(axis_y)}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{_fmt(MARGIN_LEFT)}" y1="{_fmt(MARGIN_TOP)}" x2="{_fmt(MARGIN_LEFT)}" '
        f'y2="{_fmt(axis_y)}" stroke="black"/>'
    )
    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(axis_y)}" x2="{_fmt(px)}" y2="{_fmt(axis_y + 5)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(axis_y + 19)}" text-anchor="middle" font-size="11">{tx:.3g}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        py = sy(ty)
        parts.append(
            f'<line x1="{_fmt(MARGIN_LEFT - 5)}" y1="{_fmt(py)}" x2="{_fmt(MARGIN_LEFT)}" y2="{_fmt(py)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(MARGIN_LEFT - 8)}" y="{_fmt(py + 4)}" text-anchor="end" font-size="11">{ty:.3g}</text>'
        )
    parts.append(
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 8:.0f}" text-anchor="middle" font-size="12">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{HEIGHT / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {HEIGHT / 2:.0f})">{y_label}</text>'
    )
    for i, (name, pts) in enumerate(sorted(curves.items())):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in sorted(pts))
        if len(pts) > 1:
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="2.4" fill="{color}"/>')
        ly = MARGIN_TOP + 14.0 * i
        lx = MARGIN_LEFT + plot_w - 150.0
        parts.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(ly)}" x2="{_fmt(lx + 18)}" y2="{_fmt(ly)}" '
            f'stroke="{color}" stroke-width="1.8"/>'
        )
        parts.append(f'<text x="{_fmt(lx + 23)}" y="{_fmt(ly + 4)}" font-size="11">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _eval_curves(tagged: list[tuple[str, list[RoundRecord]]]) -> dict:
    curves = {}
    for tag, records in tagged:
        for model in ("global", "center"):
            values = series(records, model, "eval")
            if values:
                curves[f"{tag} {model}"] = [(float(r), v) for r, v in values.items()]
    return curves


def _train_curves(tagged: list[tuple[str, list[RoundRecord]]]) -> dict:
    curves = {}
    for tag, records in tagged:
        for model, label in (("client", "client mean"), ("center", "center")):
            values = series(records, model, "train")
            if values:
                curves[f"{tag} {label}"] = [(float(r), v) for r, v in values.items()]
    return curves


def emit_plots(metrics_paths: list[str | Path], out_dir: str | Path) -> list[Path]:
    """Validation-reward and training-reward charts plus the tidy data CSV."""
    if not metrics_paths:
        raise ValueError("no metrics files given")
    tagged = []
    for path in metrics_paths:
        records = read_metrics(path)
        if not records:
            raise ValueError(f"metrics file {path} has no rows")
        tagged.append((Path(path).stem, records))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    eval_curves = _eval_curves(tagged)
    if eval_curves:
        svg = render_line_chart(eval_curves, "Validation rewards", "round", "mean episode reward")
        path = out_dir / "evaluation_rewards.svg"
        path.write_text(svg)
        written.append(path)
    train_curves = _train_curves(tagged)
    if train_curves:
        svg = render_line_chart(train_curves, "Training rewards", "round", "mean episode reward")
        path = out_dir / "training_rewards.svg"
        path.write_text(svg)
        written.append(path)
    if not written:
        raise ValueError("metrics files contain no plottable series")

    tidy = out_dir / "plot_data.csv"
    with open(tidy, "w") as fh:
        fh.write("chart,series,round,value\n")
        for chart, curves in (("evaluation", eval_curves), ("training", train_curves)):
            for name in sorted(curves):
                for x, y in sorted(curves[name]):
                    fh.write(f"{chart},{name},{x:g},{y!r}\n")
    written.append(tidy)
    return written
