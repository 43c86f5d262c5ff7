"""File writers for CLI runs: CSV/JSON tables and minimal SVG line plots.

Every file starts with a provenance header (tool version, subcommand, seed,
input hash).  Nothing time- or host-dependent is written, so identical
inputs and seed give byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    seed: int
    input_hash: str
    out_dir: Path
    fmt: str = "csv"
    version: str = ""
    tolerances: tuple = ()

    def header_fields(self) -> dict:
        fields = {
            "tool": f"localflow {self.version}",
            "subcommand": self.subcommand,
            "seed": str(self.seed),
            "input_sha256": self.input_hash,
        }
        for k, v in self.tolerances:
            fields[k] = fmt_value(v)
        return fields

    def header_line(self) -> str:
        return " ".join(f"{k}={v}" if k != "tool" else v for k, v in self.header_fields().items())


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_params(params: dict) -> str:
    return sha256_bytes(json.dumps(params, sort_keys=True, separators=(",", ":")).encode())


def fmt_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, complex):
        if v.imag == 0:
            return fmt_value(v.real)
        return repr(v)
    if isinstance(v, float):
        if v == 0:
            return "0.0"
        return repr(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, complex):
        return v.real if v.imag == 0 else [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        return v.item()
    return v


def write_table(manifest: RunManifest, stem: str, columns: Sequence[str], rows) -> Path:
    manifest.out_dir.mkdir(parents=True, exist_ok=True)
    if manifest.fmt == "json":
        path = manifest.out_dir / f"{stem}.json"
        doc = {
            "meta": manifest.header_fields(),
            "columns": list(columns),
            "rows": [[_jsonable(x) for x in r] for r in rows],
        }
        path.write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
        return path
    path = manifest.out_dir / f"{stem}.csv"
    buf = io.StringIO()
    buf.write(f"# {manifest.header_line()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt_value(x) for x in r])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    """Read back a CSV written by :func:`write_table`, skipping the header comment."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def line_plot_svg(
    series: dict,
    title: str,
    xlabel: str,
    ylabel: str,
    comment: str = "",
    width: int = 640,
    height: int = 400,
    hline: float | None = None,
) -> str:
    """Polyline plot of ``{name: (xs, ys)}`` with axes, ticks and a legend."""
    left, right, top, bottom = 70, 150, 40, 55
    pw, ph = width - left - right, height - top - bottom
    xs_all = [x for xs, _ in series.values() for x in xs]
    ys_all = [y for _, ys in series.values() for y in ys if math.isfinite(y)]
    if hline is not None:
        ys_all.append(hline)
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
    ]
    if comment:
        out.append(f"<!-- {comment.replace('--', '-')} -->")
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>'
    )
    out.append(
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>'
    )
    for t in _ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.1f}" y1="{top + ph}" x2="{X:.1f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{X:.1f}" y="{top + ph + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">{t:.3g}</text>'
        )
    for t in _ticks(y0, y1):
        Y = sy(t)
        out.append(f'<line x1="{left - 5}" y1="{Y:.1f}" x2="{left}" y2="{Y:.1f}" stroke="black"/>')
        out.append(
            f'<text x="{left - 8}" y="{Y + 4:.1f}" text-anchor="end" font-family="sans-serif" font-size="11">{t:.3g}</text>'
        )
    if hline is not None and y0 <= hline <= y1:
        Y = sy(hline)
        out.append(
            f'<line x1="{left}" y1="{Y:.1f}" x2="{left + pw}" y2="{Y:.1f}" stroke="grey" stroke-dasharray="4 3"/>'
        )
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">{xlabel}</text>'
    )
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{ylabel}</text>'
    )
    for k, (name, (xs, ys)) in enumerate(series.items()):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys) if math.isfinite(y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        ly = top + 14 + 18 * k
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text x="{left + pw + 35}" y="{ly + 4}" font-family="sans-serif" font-size="11">{name}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(manifest: RunManifest, stem: str, svg: str) -> Path:
    manifest.out_dir.mkdir(parents=True, exist_ok=True)
    path = manifest.out_dir / f"{stem}.svg"
    path.write_text(svg, encoding="utf-8")
    return path
