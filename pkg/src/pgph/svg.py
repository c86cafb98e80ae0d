"""Bar code rendering.

``render_svg`` draws a barcode into a fixed 640x400 viewport: the N
columns of the quotient chain are evenly spaced left to right with
column 1 (the full group) leftmost, each bar copy occupies its own row
as a horizontal segment with a filled circle at both endpoints, and a
bar born and dying in the same column is a single circle with no
segment.  The output is a pure function of the barcode, so repeated
renders are byte-identical.
"""

from __future__ import annotations

from pgph.persistence import Barcode

WIDTH = 640
HEIGHT = 400
MARGIN = 40

_STYLE = (".axis{stroke:#444;stroke-width:1}"
          ".tick{stroke:#444;stroke-width:1}"
          ".label{font:12px sans-serif;fill:#444;text-anchor:middle}"
          ".title{font:13px sans-serif;fill:#222}"
          ".bar{stroke:#1f4e79;stroke-width:3}"
          ".dot{fill:#1f4e79}")


def _fmt(value: float) -> str:
    text = f"{value:.2f}"
    return text.rstrip("0").rstrip(".") if "." in text else text


def _column_x(columns: int) -> list[float]:
    span = WIDTH - 2 * MARGIN
    if columns == 1:
        return [MARGIN + span / 2]
    step = span / (columns - 1)
    return [MARGIN + i * step for i in range(columns)]


def _expand(bars) -> list[tuple[int, int]]:
    copies = []
    for birth, death, mult in sorted(bars):
        copies.extend([(birth, death)] * mult)
    return copies


def render_svg(bc: Barcode) -> str:
    """Deterministic SVG document text for one barcode."""
    xs = _column_x(bc.columns) if bc.columns else []
    base = HEIGHT - MARGIN
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">',
           f"<style>{_STYLE}</style>",
           '<g class="axes">',
           f'<line class="axis" x1="{MARGIN}" y1="{MARGIN}" '
           f'x2="{MARGIN}" y2="{base}"/>',
           f'<line class="axis" x1="{MARGIN}" y1="{base}" '
           f'x2="{WIDTH - MARGIN}" y2="{base}"/>']
    for i, x in enumerate(xs):
        out.append(f'<line class="tick" x1="{_fmt(x)}" y1="{base}" '
                   f'x2="{_fmt(x)}" y2="{base + 6}"/>')
        out.append(f'<text class="label" x="{_fmt(x)}" y="{base + 20}">'
                   f'{i + 1}</text>')
    out.append(f'<text class="title" x="{MARGIN}" y="{MARGIN - 14}">'
               f'degree {bc.degree}</text>')
    out.append("</g>")
    copies = _expand(bc.bars)
    if copies:
        out.append('<g class="bars">')
        gap = (base - MARGIN) / (len(copies) + 1)
        for row, (birth, death) in enumerate(copies):
            y = _fmt(MARGIN + (row + 1) * gap)
            x1, x2 = _fmt(xs[birth - 1]), _fmt(xs[death - 1])
            if birth != death:
                out.append(f'<line class="bar" x1="{x1}" y1="{y}" '
                           f'x2="{x2}" y2="{y}"/>')
                out.append(f'<circle class="dot" cx="{x1}" cy="{y}" r="4"/>')
                out.append(f'<circle class="dot" cx="{x2}" cy="{y}" r="4"/>')
            else:
                out.append(f'<circle class="dot" cx="{x1}" cy="{y}" r="4"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def barcode_text(bc: Barcode) -> str:
    """Plain-text listing: one line per distinct bar, sorted."""
    lines = [f"degree {bc.degree}, columns {bc.columns}"]
    for birth, death, mult in sorted(bc.bars):
        shape = "point" if birth == death else "bar"
        lines.append(f"  [{birth}, {death}] x{mult} {shape}")
    if not bc.bars:
        lines.append("  (empty)")
    return "\n".join(lines) + "\n"
