"""CSV and SVG rendering with atomic file writes."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

import numpy as np

SIG_DIGITS = 13
SVG_WIDTH, SVG_HEIGHT = 800, 600
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#000000", "#ff7f0e", "#8c564b")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0.0:
            return "0"
        return f"{x:.{SIG_DIGITS}g}"
    return str(x)


def render_csv(header, rows, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def read_csv(path):
    """Parse a file written by :func:`render_csv`: ``(comments, header, rows)``."""
    comments, lines = [], []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                lines.append(line)
    r = csv.reader(lines)
    header = next(r)
    return comments, header, list(r)


def write_atomic(files: dict[Path, str]) -> None:
    """Write every file via a temp file and rename; nothing is left half-written."""
    staged = []
    try:
        for path, text in files.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


def line_plot(series, xlabel="p", ylabel="", title="", xlim=(0.0, 1.0), ylim=None) -> str:
    """Minimal SVG polyline plot; ``series`` is a list of ``(label, xs, ys)``."""
    ml, mr, mt, mb = 70, 160, 40, 60
    w, h = SVG_WIDTH - ml - mr, SVG_HEIGHT - mt - mb
    finite = [np.asarray(y, float)[np.isfinite(y)] for _, _, y in series]
    finite = [f for f in finite if f.size]
    if ylim is None:
        lo = min((f.min() for f in finite), default=0.0)
        hi = max((f.max() for f in finite), default=1.0)
        if hi <= lo:
            hi = lo + 1.0
        ylim = (min(lo, 0.0), hi)
    x0, x1 = xlim
    y0, y1 = ylim

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * w

    def sy(y):
        return mt + h - (y - y0) / (y1 - y0) * h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{w}" height="{h}" fill="none" stroke="black"/>',
        f'<text x="{SVG_WIDTH / 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<text x="{ml + w / 2}" y="{SVG_HEIGHT - 15}" text-anchor="middle" font-size="14">{xlabel}</text>',
        f'<text x="18" y="{mt + h / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {mt + h / 2})">{ylabel}</text>',
    ]
    for t in np.linspace(0, 1, 6):
        xv, yv = x0 + t * (x1 - x0), y0 + t * (y1 - y0)
        out.append(f'<text x="{sx(xv):.1f}" y="{mt + h + 18}" text-anchor="middle" font-size="11">{xv:.2g}</text>')
        out.append(f'<text x="{ml - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end" font-size="11">{yv:.3g}</text>')
    for k, (label, xs, ys) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys) if np.isfinite(y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = mt + 20 + 18 * k
        out.append(f'<line x1="{ml + w + 12}" y1="{ly}" x2="{ml + w + 32}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ml + w + 38}" y="{ly + 4}" font-size="12">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
