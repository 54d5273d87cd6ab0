"""Interval charts: one row per series, a box over [lo, hi] and a star at the mean."""

from __future__ import annotations

from xml.sax.saxutils import escape

ASCII_WIDTH = 80


def _axis(rows, axis):
    if axis is not None:
        return axis
    lo = min(r["lo"] for r in rows)
    hi = max(r["hi"] for r in rows)
    if hi <= lo:  # every interval is the same point
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def render_ascii(rows, axis=None) -> str:
    """Fixed 80-column chart.

    ``rows`` are dicts with ``label``, ``lo``, ``hi`` and ``mean``.  Box
    characters are ``[``, ``=`` and ``]``; ``*`` marks the mean.
    """
    a, b = _axis(rows, axis)
    label_w = min(max(len(r["label"]) for r in rows), 16)
    cols = ASCII_WIDTH - label_w - 3

    def col(v):
        return min(cols - 1, max(0, round((v - a) / (b - a) * (cols - 1))))

    lines = []
    for r in rows:
        cells = [" "] * cols
        i, j = col(r["lo"]), col(r["hi"])
        for k in range(i, j + 1):
            cells[k] = "="
        cells[i] = "["
        cells[j] = "]" if j > i else "|"
        cells[col(r["mean"])] = "*"
        lines.append(f"{r['label'][:label_w]:>{label_w}} |" + "".join(cells) + "|")
    left, right = _fmt(a), _fmt(b)
    pad = cols - len(left) - len(right)
    lines.append(" " * label_w + " +" + "-" * cols + "+")
    lines.append(" " * (label_w + 2) + left + " " * max(pad, 1) + right)
    return "\n".join(line.rstrip() for line in lines) + "\n"


def render_svg(rows, axis=None, title=None) -> str:
    a, b = _axis(rows, axis)
    width, row_h, left, right, top = 640, 28, 140, 20, 30 if title else 10
    plot_w = width - left - right
    height = top + row_h * len(rows) + 40

    def x(v):
        return left + (v - a) / (b - a) * plot_w

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(
            f'<text x="{width / 2:.2f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{escape(title)}</text>'
        )
    for i, r in enumerate(rows):
        cy = top + row_h * i + row_h / 2
        x0, x1 = x(r["lo"]), x(r["hi"])
        out.append(
            f'<text x="{left - 8}" y="{cy + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{escape(r["label"])}</text>'
        )
        out.append(
            f'<rect x="{x0:.2f}" y="{cy - 8:.2f}" width="{max(x1 - x0, 0.0):.2f}" '
            'height="16" fill="#9ecae1" stroke="#08519c"/>'
        )
        out.append(
            f'<text x="{x(r["mean"]):.2f}" y="{cy + 5:.2f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16" fill="#a50f15">*</text>'
        )
    ay = top + row_h * len(rows) + 8
    out.append(
        f'<line x1="{left}" y1="{ay:.2f}" x2="{left + plot_w}" y2="{ay:.2f}" stroke="black"/>'
    )
    for v, anchor in ((a, "start"), (b, "end")):
        out.append(
            f'<text x="{x(v):.2f}" y="{ay + 18:.2f}" text-anchor="{anchor}" '
            f'font-family="sans-serif" font-size="11">{_fmt(v)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
