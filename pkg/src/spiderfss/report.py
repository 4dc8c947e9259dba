"""CSV/SVG output with a '#'-prefixed run manifest, written atomically."""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import __version__


def fmt(value) -> str:
    """Integers and strings verbatim, floats to 12 significant digits."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.12g}"


@dataclass
class RunManifest:
    command: str
    params: dict
    master_seed: int | None = None
    version: str = __version__
    duration_s: float | None = None
    extra: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [
            f"# spiderfss {self.version}",
            f"# command: {self.command}",
            f"# params: {json.dumps(self.params, sort_keys=True)}",
        ]
        if self.master_seed is not None:
            out.append(f"# master_seed: {self.master_seed}")
        for key, value in self.extra.items():
            out.append(f"# {key}: {value}")
        if self.duration_s is not None:
            out.append(f"# wall_clock_s: {self.duration_s:.3f}")
        return out


def csv_block(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def data_block(text: str) -> str:
    """The part of a CSV document after the manifest comments."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


def render(manifest: RunManifest, body: str) -> str:
    return "\n".join(manifest.lines()) + "\n" + body


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory and rename into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


# -- minimal SVG chart --------------------------------------------------------

_W, _H = 640, 400
_PAD_L, _PAD_R, _PAD_T, _PAD_B = 60, 20, 20, 45


def svg_chart(
    *,
    bound: Sequence[tuple[float, float]] = (),
    estimates: Sequence[tuple[float, float, float]] = (),
    hline: float | None = None,
    title: str = "",
) -> str:
    """Bound polyline (orange, dashed), estimates with +-2 SE bars, optional
    horizontal reference line. The n axis is log-scaled."""
    ns = [n for n, _ in bound] + [n for n, _, _ in estimates]
    ys = [y for _, y in bound] + [y + 2 * s for _, y, s in estimates] + [y - 2 * s for _, y, s in estimates]
    if hline is not None:
        ys.append(hline)
    if not ns:
        raise ValueError("nothing to plot")
    lo_n, hi_n = math.log10(min(ns)), math.log10(max(ns))
    if hi_n == lo_n:
        lo_n, hi_n = lo_n - 0.5, hi_n + 0.5
    lo_y, hi_y = min(0.0, min(ys)), max(1.0, max(ys))

    def px(n):
        return _PAD_L + (math.log10(n) - lo_n) / (hi_n - lo_n) * (_W - _PAD_L - _PAD_R)

    def py(y):
        return _H - _PAD_B - (y - lo_y) / (hi_y - lo_y) * (_H - _PAD_T - _PAD_B)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{_PAD_L}" y1="{_H - _PAD_B}" x2="{_W - _PAD_R}" y2="{_H - _PAD_B}" stroke="black"/>',
        f'<line x1="{_PAD_L}" y1="{_PAD_T}" x2="{_PAD_L}" y2="{_H - _PAD_B}" stroke="black"/>',
    ]
    for e in range(math.ceil(lo_n), math.floor(hi_n) + 1):
        x = px(10**e)
        parts.append(f'<line x1="{x:.2f}" y1="{_H - _PAD_B}" x2="{x:.2f}" y2="{_H - _PAD_B + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{_H - _PAD_B + 18}" font-size="11" text-anchor="middle">1e{e}</text>')
    for tick in _y_ticks(lo_y, hi_y):
        y = py(tick)
        parts.append(f'<line x1="{_PAD_L - 5}" y1="{y:.2f}" x2="{_PAD_L}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_PAD_L - 8}" y="{y + 4:.2f}" font-size="11" text-anchor="end">{tick:g}</text>')
    parts.append(f'<text x="{(_W + _PAD_L) / 2:.0f}" y="{_H - 8}" font-size="12" text-anchor="middle">n</text>')
    if title:
        parts.append(f'<text x="{_PAD_L + 5}" y="{_PAD_T + 12}" font-size="12">{_escape(title)}</text>')
    if hline is not None:
        y = py(hline)
        parts.append(f'<line x1="{_PAD_L}" y1="{y:.2f}" x2="{_W - _PAD_R}" y2="{y:.2f}" stroke="gray" stroke-dasharray="2,3"/>')
    if bound:
        pts = " ".join(f"{px(n):.2f},{py(y):.2f}" for n, y in bound)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="orange" stroke-width="2" stroke-dasharray="6,4"/>')
    for n, y, s in estimates:
        x = px(n)
        parts.append(f'<line x1="{x:.2f}" y1="{py(y - 2 * s):.2f}" x2="{x:.2f}" y2="{py(y + 2 * s):.2f}" stroke="steelblue"/>')
        parts.append(f'<circle cx="{x:.2f}" cy="{py(y):.2f}" r="2.5" fill="steelblue"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _y_ticks(lo: float, hi: float) -> list[float]:
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / 5)) if span > 0 else 1.0
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 8:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12:
        ticks.append(round(v, 12))
        v += step
    return ticks


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
