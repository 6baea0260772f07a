"""Self-contained SVG scatter plots of extrapolation convergence data.

The two panels visualize how the normalized diagonal sequence approaches
its limit: the raw u_n drift is linear against 10 n^{-1/3} (the size of
the first neglected correction term), and the window-extrapolated v_n,
after subtracting the limit estimate, is linear against 10^{18} n^{-6}
(the order of the first term an 18-point window cannot cancel).  Points
landing near a straight line through the data is the visual diagnostic
that the correction-term model holds at these sizes.

SVG is assembled directly — no plotting dependency — so figure bytes are
a deterministic function of the input rows.
"""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Optional

from .errors import RangeError, ValidationError

__all__ = [
    "DEFAULT_V_OFFSET",
    "PANELS",
    "convergence_rows_from_csv",
    "emit_figure",
    "panel_points",
    "render_scatter",
]

PANELS = ("u", "vhat")

#: limit estimate subtracted in the vhat panel (override per run)
DEFAULT_V_OFFSET = 166.95208957


def convergence_rows_from_csv(text: str) -> list[dict]:
    """Parse ``n,u,v`` rows (v may be empty) into dicts."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not {"n", "u"} <= set(reader.fieldnames):
        raise ValidationError("convergence CSV needs at least columns n,u")
    rows = []
    for rec in reader:
        v = rec.get("v")
        rows.append(
            {
                "n": int(rec["n"]),
                "u": float(rec["u"]) if rec["u"] not in (None, "") else None,
                "v": float(v) if v not in (None, "") else None,
            }
        )
    return rows


def panel_points(
    rows: Iterable[dict],
    panel: str,
    *,
    offset: float = DEFAULT_V_OFFSET,
    n_min: Optional[int] = None,
    n_max: Optional[int] = None,
) -> list[tuple[float, float]]:
    """Panel coordinates for the selected rows.

    ``u`` panel: (10 n^{-1/3}, u_n); ``vhat`` panel: (1e18 n^{-6},
    v_n - offset), skipping rows without a v value.
    """
    if panel not in PANELS:
        raise ValidationError(f"unknown panel {panel!r}; expected one of {PANELS}")
    points = []
    for row in rows:
        n = row["n"]
        if n_min is not None and n < n_min:
            continue
        if n_max is not None and n > n_max:
            continue
        if panel == "u":
            if row.get("u") is None:
                continue
            points.append((10.0 * n ** (-1.0 / 3.0), row["u"]))
        else:
            if row.get("v") is None:
                continue
            points.append((1e18 * float(n) ** -6.0, row["v"] - offset))
    if not points:
        raise RangeError("no data points in the requested n-range")
    return points


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """About ``target`` round-valued ticks covering [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValidationError("non-finite axis range")
    if lo == hi:  # degenerate: pad to a unit box around the value
        pad = 1.0 if lo == 0 else abs(lo) * 0.5
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / max(target, 2)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def render_scatter(
    points: list[tuple[float, float]],
    *,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    width: int = 720,
    height: int = 480,
) -> str:
    """A complete SVG document scatter-plotting ``points``."""
    if not points:
        raise RangeError("nothing to plot")
    margin_l, margin_r, margin_t, margin_b = 78, 24, 42, 56
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b
    if plot_w <= 10 or plot_h <= 10:
        raise ValidationError("figure dimensions too small")

    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_ticks = _nice_ticks(min(xs), max(xs))
    y_ticks = _nice_ticks(min(ys), max(ys))
    x_lo = min(min(xs), x_ticks[0])
    x_hi = max(max(xs), x_ticks[-1])
    y_lo = min(min(ys), y_ticks[0])
    y_hi = max(max(ys), y_ticks[-1])
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def sx(x: float) -> float:
        return margin_l + (x - x_lo) / x_span * plot_w

    def sy(y: float) -> float:
        return margin_t + plot_h - (y - y_lo) / y_span * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        '<g font-family="sans-serif" font-size="12" fill="black">',
    ]
    if title:
        out.append(
            f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
            f'font-size="15">{title}</text>'
        )
    # frame
    out.append(
        f'<rect x="{margin_l}" y="{margin_t}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="black"/>'
    )
    for t in x_ticks:
        px = sx(t)
        out.append(
            f'<line x1="{px:.2f}" y1="{margin_t + plot_h}" x2="{px:.2f}" '
            f'y2="{margin_t + plot_h + 5}" stroke="black"/>'
        )
        out.append(
            f'<text x="{px:.2f}" y="{margin_t + plot_h + 19}" '
            f'text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in y_ticks:
        py = sy(t)
        out.append(
            f'<line x1="{margin_l - 5}" y1="{py:.2f}" x2="{margin_l}" '
            f'y2="{py:.2f}" stroke="black"/>'
        )
        out.append(
            f'<text x="{margin_l - 9}" y="{py + 4:.2f}" '
            f'text-anchor="end">{_fmt(t)}</text>'
        )
    if x_label:
        out.append(
            f'<text x="{margin_l + plot_w / 2:.1f}" y="{height - 14}" '
            f'text-anchor="middle">{x_label}</text>'
        )
    if y_label:
        cy = margin_t + plot_h / 2
        out.append(
            f'<text x="20" y="{cy:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 20 {cy:.1f})">{y_label}</text>'
        )
    for x, y in points:
        out.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" '
            'fill="steelblue" fill-opacity="0.75"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_figure(
    rows: Iterable[dict],
    panel: str,
    *,
    offset: float = DEFAULT_V_OFFSET,
    n_min: Optional[int] = None,
    n_max: Optional[int] = None,
    title: Optional[str] = None,
) -> str:
    """Scatter SVG for one panel of the convergence data."""
    points = panel_points(rows, panel, offset=offset, n_min=n_min, n_max=n_max)
    if panel == "u":
        x_label = "10 n^(-1/3)"
        y_label = "u_n"
        default_title = "normalized diagonal u_n"
    else:
        x_label = "10^18 n^(-6)"
        y_label = f"v_n - {offset}"
        default_title = "extrapolated v_n minus limit estimate"
    return render_scatter(
        points,
        title=default_title if title is None else title,
        x_label=x_label,
        y_label=y_label,
    )
