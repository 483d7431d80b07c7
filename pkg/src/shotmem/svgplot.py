"""Small hand-rolled SVG 1.1 emitters for signals and summary tables."""

from __future__ import annotations

from typing import Mapping, Sequence
from xml.sax.saxutils import escape

from .corpus import Aspect
from .errors import ValidationError
from .signals import MemSignal

SVG_NS = "http://www.w3.org/2000/svg"

ASPECT_COLORS = {
    Aspect.CRIME_SCENE: "#e6a03c",
    Aspect.VICTIM: "#d05c5c",
    Aspect.DEATH_CAUSE: "#8c5cd0",
    Aspect.EVIDENCE: "#4c9ed9",
    Aspect.PERPETRATOR: "#3cb371",
    Aspect.MOTIVE: "#d94c8a",
    Aspect.SUSPECT: "#b8b83c",
    Aspect.NONE: "#c8c8c8",
}

LINE_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")

# Priority used to pick a band color when a shot carries several aspects.
_BAND_PRIORITY = [a for a in Aspect if a is not Aspect.NONE]


def _fmt(value: float) -> str:
    return f"{value:.2f}".rstrip("0").rstrip(".")


class _Svg:
    def __init__(self, width: int, height: int, title: str):
        self.width = width
        self.height = height
        self.parts = [
            f'<svg xmlns="{SVG_NS}" version="1.1" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f"<title>{escape(title)}</title>",
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]

    def rect(self, x, y, w, h, fill, opacity=None, cls=None):
        extra = f' opacity="{opacity}"' if opacity is not None else ""
        extra += f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            f'fill="{fill}"{extra}/>'
        )

    def line(self, x1, y1, x2, y2, stroke="#333", width=1.0):
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{width}"/>'
        )

    def polyline(self, points: Sequence[tuple[float, float]], stroke: str, cls: str):
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="1.2" class="{cls}"/>'
        )

    def circle(self, x, y, r, fill, cls=None):
        extra = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{fill}"{extra}/>'
        )

    def text(self, x, y, content, size=10, anchor="start", fill="#333"):
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}" fill="{fill}">'
            f"{escape(str(content))}</text>"
        )

    def render(self) -> str:
        return "\n".join([*self.parts, "</svg>"]) + "\n"


def _scales(width, height, margin, x_span, y_lo, y_hi):
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin
    y_range = (y_hi - y_lo) or 1.0

    def sx(t):
        return margin + (t / x_span) * plot_w if x_span else margin

    def sy(v):
        return height - margin - ((v - y_lo) / y_range) * plot_h

    return sx, sy


def _aspect_bands(band_spans):
    """Merge consecutive shots sharing a primary aspect into colored spans."""
    merged = []
    for start_ms, end_ms, aspects in band_spans:
        primary = next((a for a in _BAND_PRIORITY if a in aspects), None)
        if primary is None:
            continue
        if merged and merged[-1][2] is primary and merged[-1][1] >= start_ms:
            merged[-1] = (merged[-1][0], end_ms, primary)
        else:
            merged.append((start_ms, end_ms, primary))
    return merged


def signal_chart(
    raw: MemSignal,
    smoothed: Mapping[int, MemSignal],
    band_spans: Sequence[tuple[int, int, frozenset]] = (),
    width: int = 900,
    height: int = 320,
) -> str:
    """Line chart of an episode's memorability signal.

    With no smoothing windows selected the raw signal is the single
    polyline; with windows, raw scores become background dots and each
    window gets its own polyline.
    """
    if len(raw) == 0:
        raise ValidationError(f"{raw.episode_id}: cannot plot an empty signal")
    margin = 40
    times = [p.start_ms for p in raw.points]
    all_scores = list(raw.scores())
    for sig in smoothed.values():
        all_scores.extend(sig.scores())
    y_lo, y_hi = min(all_scores), max(all_scores)
    pad = (y_hi - y_lo) * 0.05 or 0.05
    sx, sy = _scales(width, height, margin, max(times[-1], 1), y_lo - pad, y_hi + pad)

    svg = _Svg(width, height, f"Memorability signal: {raw.episode_id}")
    for start_ms, end_ms, aspect in _aspect_bands(band_spans):
        svg.rect(
            sx(start_ms),
            margin,
            max(sx(end_ms) - sx(start_ms), 0.5),
            height - 2 * margin,
            ASPECT_COLORS[aspect],
            opacity=0.18,
            cls=f"band-{aspect.value}",
        )
    svg.line(margin, height - margin, width - margin, height - margin)
    svg.line(margin, margin, margin, height - margin)
    svg.text(width / 2, height - 8, "time (ms)", anchor="middle")
    svg.text(12, margin - 8, "memorability")

    raw_pts = [(sx(p.start_ms), sy(p.score)) for p in raw.points]
    if not smoothed:
        svg.polyline(raw_pts, stroke="#555", cls="raw")
    else:
        for x, y in raw_pts:
            svg.circle(x, y, 1.5, "#bbb", cls="raw-pt")
        for color, n in zip(LINE_COLORS, sorted(smoothed)):
            pts = [(sx(p.start_ms), sy(p.score)) for p in smoothed[n].points]
            svg.polyline(pts, stroke=color, cls=f"smoothed-{n}")
            svg.text(width - margin - 80, margin + 14 * (sorted(smoothed).index(n) + 1),
                     f"N={n}", fill=color)
    return svg.render()


def bar_chart(labels: Sequence[str], values: Sequence[float], title: str,
              width: int = 640, height: int = 320) -> str:
    if len(labels) != len(values):
        raise ValidationError(f"{len(labels)} labels for {len(values)} values")
    if not labels:
        raise ValidationError("cannot plot an empty bar chart")
    margin = 50
    top = max(max(values), 0.0) or 1.0
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin
    step = plot_w / len(labels)
    svg = _Svg(width, height, title)
    svg.text(width / 2, 20, title, size=12, anchor="middle")
    svg.line(margin, height - margin, width - margin, height - margin)
    for i, (label, value) in enumerate(zip(labels, values)):
        h = (max(value, 0.0) / top) * plot_h
        svg.rect(margin + i * step + step * 0.15, height - margin - h,
                 step * 0.7, h, LINE_COLORS[0], cls="bar")
        svg.text(margin + (i + 0.5) * step, height - margin + 14, label,
                 size=9, anchor="middle")
        svg.text(margin + (i + 0.5) * step, height - margin - h - 4,
                 f"{value:.3g}", size=8, anchor="middle")
    return svg.render()


def boxen_chart(summaries, title: str, width: int = 760, height: int = 360) -> str:
    """Letter-value boxes (sixteenth/eighth/fourth spans plus a median tick)."""
    groups = [s for s in summaries if s.n > 0]
    if not groups:
        raise ValidationError("no non-empty groups to plot")
    margin = 50
    lo = min(s.sixteenth_lo for s in groups)
    hi = max(s.sixteenth_hi for s in groups)
    pad = (hi - lo) * 0.05 or 0.05
    _, sy = _scales(width, height, margin, 1.0, lo - pad, hi + pad)
    step = (width - 2 * margin) / len(groups)
    svg = _Svg(width, height, title)
    svg.text(width / 2, 20, title, size=12, anchor="middle")
    svg.line(margin, height - margin, width - margin, height - margin)
    layers = (("sixteenth", 0.30, 0.25), ("eighth", 0.55, 0.45), ("fourth", 0.85, 0.7))
    for i, s in enumerate(groups):
        cx = margin + (i + 0.5) * step
        spans = {
            "fourth": (s.q1, s.q3),
            "eighth": (s.eighth_lo, s.eighth_hi),
            "sixteenth": (s.sixteenth_lo, s.sixteenth_hi),
        }
        for name, opacity, rel_width in layers:
            v_lo, v_hi = spans[name]
            w = step * rel_width * 0.8
            svg.rect(cx - w / 2, sy(v_hi), w, max(sy(v_lo) - sy(v_hi), 0.5),
                     LINE_COLORS[0], opacity=opacity, cls=f"lv-{name}")
        w = step * 0.8 * 0.8
        svg.line(cx - w / 2, sy(s.median), cx + w / 2, sy(s.median), stroke="#222", width=1.5)
        svg.text(cx, height - margin + 14, f"{s.key} ({s.season})", size=8, anchor="middle")
    return svg.render()


def scatter_chart(rows: Sequence[tuple[str, float, float]], rho: float, title: str,
                  width: int = 520, height: int = 360) -> str:
    """Speaking time vs median memorability, one labelled point per character."""
    if not rows:
        raise ValidationError("cannot plot an empty scatter chart")
    margin = 55
    xs = [r[1] for r in rows]
    ys = [r[2] for r in rows]
    x_hi = max(xs) or 1.0
    y_lo, y_hi = min(ys), max(ys)
    pad = (y_hi - y_lo) * 0.08 or 0.05
    sx, sy = _scales(width, height, margin, x_hi * 1.05, y_lo - pad, y_hi + pad)
    svg = _Svg(width, height, title)
    svg.text(width / 2, 20, f"{title} (Spearman rho = {rho:.3f})", size=11, anchor="middle")
    svg.line(margin, height - margin, width - margin, height - margin)
    svg.line(margin, margin, margin, height - margin)
    svg.text(width / 2, height - 10, "speaking time (min)", size=10, anchor="middle")
    for name, minutes, median in rows:
        svg.circle(sx(minutes), sy(median), 3.5, LINE_COLORS[3], cls="pt")
        svg.text(sx(minutes) + 5, sy(median) - 5, name, size=8)
    return svg.render()
