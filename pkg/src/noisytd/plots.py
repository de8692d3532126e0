"""Deterministic SVG line charts of clean error against tree size."""
from __future__ import annotations

from collections import defaultdict
from pathlib import Path

from .errors import EmptyReport

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=150, top=40, bottom=50)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def padded_range(values, pad: float = 0.05) -> tuple[float, float]:
    """Data min/max widened by ``pad`` of the span (or of the magnitude for a single value)."""
    lo, hi = min(values), max(values)
    span = hi - lo
    if span == 0:
        span = abs(lo) if lo != 0 else 1.0
        return lo - pad * span, hi + pad * span
    return lo - pad * span, hi + pad * span


def series_by_eta(rows) -> dict[float, list[tuple[int, float]]]:
    """Mean clean error per (eta, t) across trials."""
    acc = defaultdict(list)
    for r in rows:
        acc[(r.eta, r.t)].append(r.error_clean)
    out = defaultdict(list)
    for (eta, t), vals in sorted(acc.items()):
        out[eta].append((t, sum(vals) / len(vals)))
    return dict(out)


def render_svg(title: str, series: dict) -> str:
    xs = [t for pts in series.values() for t, _ in pts]
    ys = [e for pts in series.values() for _, e in pts]
    x0, x1 = padded_range(xs)
    y0, y1 = padded_range(ys)
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN["top"] + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="14">{_escape(title)}</text>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for j in range(5):
        xv = x0 + (x1 - x0) * j / 4
        yv = y0 + (y1 - y0) * j / 4
        out.append(f'<text x="{_fmt(sx(xv))}" y="{HEIGHT - MARGIN["bottom"] + 18}" text-anchor="middle">{xv:.4g}</text>')
        out.append(f'<text x="{MARGIN["left"] - 6}" y="{_fmt(sy(yv) + 4)}" text-anchor="end">{yv:.4g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">tree size t</text>')
    out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.2f})">clean error</text>')
    for j, (eta, pts) in enumerate(sorted(series.items(), key=lambda kv: (kv[0] is None, kv[0]))):
        color = COLORS[j % len(COLORS)]
        coords = " ".join(f"{_fmt(sx(t))},{_fmt(sy(e))}" for t, e in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        for t, e in pts:
            out.append(f'<circle cx="{_fmt(sx(t))}" cy="{_fmt(sy(e))}" r="3" fill="{color}"/>')
        ly = MARGIN["top"] + 16 + 18 * j
        lx = WIDTH - MARGIN["right"] + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        label = "eta=" + ("?" if eta is None else f"{eta:g}")
        out.append(f'<text x="{lx + 26}" y="{ly}">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_plots(rows, out_dir) -> list[Path]:
    """One SVG per experiment, one polyline per eta."""
    rows = list(rows)
    if not rows:
        raise EmptyReport("report has no rows to plot")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_exp = defaultdict(list)
    for r in rows:
        by_exp[r.experiment].append(r)
    paths = []
    for exp in sorted(by_exp):
        path = out / (exp.replace(":", "_").replace("/", "_") + ".svg")
        path.write_text(render_svg(exp, series_by_eta(by_exp[exp])))
        paths.append(path)
    return paths
