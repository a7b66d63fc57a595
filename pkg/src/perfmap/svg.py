"""Static SVG heatmaps of performance-map projections.

Cells are colored by mean performance on a small interpolated palette; cells
that hit the evaluation deadline get a hatched sentinel style, and cells a
partial map never evaluated get a distinct absent style. A legend shows the
color ramp and both special styles.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .maps import PlotProjection

_PALETTE = (
    (0.00, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.50, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.00, (253, 231, 37)),
)

CELL = 14
LEFT = 70
TOP = 46
BOTTOM = 86
RIGHT = 26
LEGEND_H = 56


def _color(value: float, vmin: float, vmax: float) -> str:
    if vmax <= vmin:
        frac = 1.0
    else:
        frac = (value - vmin) / (vmax - vmin)
    frac = min(max(frac, 0.0), 1.0)
    for (p0, c0), (p1, c1) in zip(_PALETTE[:-1], _PALETTE[1:]):
        if frac <= p1:
            t = 0.0 if p1 == p0 else (frac - p0) / (p1 - p0)
            rgb = tuple(round(a + t * (b - a)) for a, b in zip(c0, c1))
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*_PALETTE[-1][1])


def render_svg(
    projection: PlotProjection, path: str | Path, title: str | None = None
) -> None:
    """Write the projection as a standalone SVG heatmap file."""
    nx, ny = len(projection.x_labels), len(projection.y_labels)
    width = LEFT + nx * CELL + RIGHT
    height = TOP + ny * CELL + BOTTOM + LEGEND_H
    finite = projection.values[np.isfinite(projection.values) & ~projection.timed_out]
    vmin = float(finite.min()) if finite.size else 0.0
    vmax = float(finite.max()) if finite.size else 1.0

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">'
    )
    parts.append(
        "<defs>"
        '<pattern id="timeout-hatch" width="6" height="6" patternUnits="userSpaceOnUse" '
        'patternTransform="rotate(45)">'
        '<rect width="6" height="6" fill="#7f1d1d"/>'
        '<line x1="0" y1="0" x2="0" y2="6" stroke="#fca5a5" stroke-width="2"/>'
        "</pattern>"
        '<pattern id="absent-hatch" width="6" height="6" patternUnits="userSpaceOnUse">'
        '<rect width="6" height="6" fill="#f3f4f6"/>'
        '<path d="M0 6 L6 0" stroke="#d1d5db" stroke-width="1"/>'
        "</pattern>"
        "</defs>"
    )
    shown_title = title or (
        f"{' x '.join(projection.x_names)} vs {projection.y_name}"
    )
    parts.append(
        f'<text x="{LEFT}" y="20" font-size="13" font-weight="bold">'
        f"{escape(shown_title)}</text>"
    )
    parts.append(
        f'<text x="{LEFT}" y="36" font-size="10" fill="#555">x: '
        f"{escape(' - '.join(projection.x_names))}, y: {escape(projection.y_name)}</text>"
    )

    for yi, ylab in enumerate(projection.y_labels):
        y = TOP + yi * CELL
        parts.append(
            f'<text x="{LEFT - 6}" y="{y + CELL - 4}" font-size="9" '
            f'text-anchor="end">{escape(ylab)}</text>'
        )
        for xi in range(nx):
            x = LEFT + xi * CELL
            value = projection.values[yi, xi]
            if projection.timed_out[yi, xi]:
                fill = "url(#timeout-hatch)"
                css = "cell timeout"
                label = "timeout"
            elif np.isnan(value):
                fill = "url(#absent-hatch)"
                css = "cell absent"
                label = "not evaluated"
            else:
                fill = _color(float(value), vmin, vmax)
                css = "cell"
                label = f"{value:.4f}"
            parts.append(
                f'<rect class="{css}" x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                f'fill="{fill}" stroke="#ffffff" stroke-width="0.5">'
                f"<title>{escape(projection.x_labels[xi])} / {escape(ylab)}: {label}</title>"
                "</rect>"
            )

    x_base = TOP + ny * CELL
    for xi, xlab in enumerate(projection.x_labels):
        x = LEFT + xi * CELL + CELL // 2 + 3
        parts.append(
            f'<text x="{x}" y="{x_base + 6}" font-size="7" text-anchor="end" '
            f'transform="rotate(-90 {x} {x_base + 6})">{escape(xlab)}</text>'
        )

    # Legend: color ramp plus the two special cell styles.
    ly = height - LEGEND_H + 8
    ramp_w, steps = 160, 32
    for i in range(steps):
        val = vmin + (vmax - vmin) * (i / (steps - 1) if steps > 1 else 1.0)
        parts.append(
            f'<rect x="{LEFT + i * ramp_w // steps}" y="{ly}" '
            f'width="{ramp_w // steps + 1}" height="12" fill="{_color(val, vmin, vmax)}"/>'
        )
    parts.append(
        f'<text x="{LEFT}" y="{ly + 24}" font-size="9">{vmin:.2f}</text>'
        f'<text x="{LEFT + ramp_w}" y="{ly + 24}" font-size="9" '
        f'text-anchor="end">{vmax:.2f}</text>'
    )
    sx = LEFT + ramp_w + 30
    parts.append(
        f'<rect class="legend timeout" x="{sx}" y="{ly}" width="14" height="12" '
        'fill="url(#timeout-hatch)"/>'
        f'<text x="{sx + 18}" y="{ly + 10}" font-size="9">timeout (-0.2)</text>'
    )
    sx2 = sx + 110
    parts.append(
        f'<rect class="legend absent" x="{sx2}" y="{ly}" width="14" height="12" '
        'fill="url(#absent-hatch)"/>'
        f'<text x="{sx2 + 18}" y="{ly + 10}" font-size="9">not evaluated</text>'
    )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
