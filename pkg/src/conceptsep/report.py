"""Rendering and export: curve figures (SVG), density CSVs, overlap matrices.

All outputs are deterministic: fixed decimal precision, LF line endings, no
timestamps. Identical results produce byte-identical files, which makes the
artifacts golden-file testable.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .curves import CscResult, DensityCurve, overlap
from .perturb import Mode

CSV_HEADER = "grid_value,fuzz_density,negation_density"

FUZZ_COLOR = "#1f77b4"
NEGATION_COLOR = "#d62728"

_WIDTH, _HEIGHT = 640.0, 420.0
_LEFT, _RIGHT, _TOP, _BOTTOM = 64.0, 24.0, 46.0, 72.0


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _check_result(result: CscResult) -> None:
    fuz, neg = result.fuzz_curve, result.negation_curve
    if fuz.grid.size == 0 or neg.grid.size == 0:
        raise ValueError("empty curves cannot be rendered")
    if fuz.grid.shape != neg.grid.shape or not np.array_equal(fuz.grid, neg.grid):
        raise ValueError("curves must share one grid")
    for curve in (fuz, neg):
        if not np.all(np.isfinite(curve.densities)):
            raise ValueError("non-finite density in curve")
    if not np.isfinite(result.overlap):
        raise ValueError("non-finite overlap")


def _polyline(xs: np.ndarray, ys: np.ndarray, color: str) -> str:
    points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
    return (f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{points}"/>')


def curves_svg(result: CscResult, title: str) -> str:
    """Build the full SVG document for a result as a string."""
    _check_result(result)
    grid = result.fuzz_curve.grid
    fuzz = result.fuzz_curve.densities
    neg = result.negation_curve.densities

    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM
    y_max = max(float(fuzz.max()), float(neg.max()), 1e-12) * 1.05

    def px(value: float) -> float:
        return _LEFT + (value + 1.0) / 2.0 * plot_w

    def py(density: float) -> float:
        return _TOP + plot_h - density / y_max * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:g}" '
        f'height="{_HEIGHT:g}" viewBox="0 0 {_WIDTH:g} {_HEIGHT:g}">',
        f'<rect width="{_WIDTH:g}" height="{_HEIGHT:g}" fill="white"/>',
        f'<text x="{_fmt(_WIDTH / 2)}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{escape(title)}</text>',
        # axes
        f'<line x1="{_fmt(_LEFT)}" y1="{_fmt(_TOP + plot_h)}" '
        f'x2="{_fmt(_LEFT + plot_w)}" y2="{_fmt(_TOP + plot_h)}" stroke="black"/>',
        f'<line x1="{_fmt(_LEFT)}" y1="{_fmt(_TOP)}" '
        f'x2="{_fmt(_LEFT)}" y2="{_fmt(_TOP + plot_h)}" stroke="black"/>',
    ]
    for tick in (-1.0, -0.5, 0.0, 0.5, 1.0):
        x = px(tick)
        parts.append(f'<line x1="{_fmt(x)}" y1="{_fmt(_TOP + plot_h)}" '
                     f'x2="{_fmt(x)}" y2="{_fmt(_TOP + plot_h + 5)}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(x)}" y="{_fmt(_TOP + plot_h + 20)}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{tick:g}</text>')
    for frac in (0.0, 0.5, 1.0):
        y = py(frac * y_max)
        parts.append(f'<line x1="{_fmt(_LEFT - 5)}" y1="{_fmt(y)}" '
                     f'x2="{_fmt(_LEFT)}" y2="{_fmt(y)}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(_LEFT - 9)}" y="{_fmt(y + 4)}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11">{frac * y_max:.4f}</text>')

    parts.append(f'<text x="{_fmt(px(0.0))}" y="{_fmt(_HEIGHT - 34)}" '
                 f'text-anchor="middle" font-family="sans-serif" font-size="12">'
                 'cosine similarity to original</text>')
    parts.append(_polyline(np.vectorize(px)(grid), np.vectorize(py)(fuzz),
                           FUZZ_COLOR))
    parts.append(_polyline(np.vectorize(px)(grid), np.vectorize(py)(neg),
                           NEGATION_COLOR))

    # legend, top-left inside the plot area
    lx, ly = _LEFT + 12.0, _TOP + 14.0
    for label, color, dy in ((Mode.FUZZ.value, FUZZ_COLOR, 0.0),
                             (Mode.NEGATE.value, NEGATION_COLOR, 16.0)):
        parts.append(f'<line x1="{_fmt(lx)}" y1="{_fmt(ly + dy)}" '
                     f'x2="{_fmt(lx + 22)}" y2="{_fmt(ly + dy)}" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_fmt(lx + 28)}" y="{_fmt(ly + dy + 4)}" '
                     f'font-family="sans-serif" font-size="12">{label}</text>')

    parts.append(f'<text x="{_fmt(_WIDTH / 2)}" y="{_fmt(_HEIGHT - 12)}" '
                 f'text-anchor="middle" font-family="sans-serif" font-size="13">'
                 f'overlap = {result.overlap:.4f}</text>')
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def render_curves(result: CscResult, title: str, out_path: str | Path) -> Path:
    """Write the curve figure as SVG; nothing is written if validation fails."""
    svg = curves_svg(result, title)
    out_path = Path(out_path)
    out_path.write_text(svg, encoding="utf-8", newline="\n")
    return out_path


# ---------------------------------------------------------------------------
# CSV export / import
# ---------------------------------------------------------------------------

def _g9(x: float) -> str:
    return format(float(x), ".9g")


def export_csv(result: CscResult, out_path: str | Path) -> Path:
    """Write grid plus both normalized densities, 9 significant digits."""
    _check_result(result)
    lines = [CSV_HEADER]
    grid = result.fuzz_curve.grid
    fuzz = result.fuzz_curve.densities
    neg = result.negation_curve.densities
    for i in range(len(grid)):
        lines.append(f"{_g9(grid[i])},{_g9(fuzz[i])},{_g9(neg[i])}")
    out_path = Path(out_path)
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return out_path


def read_csv_curves(path: str | Path) -> CscResult:
    """Reload an exported density CSV; the overlap is recomputed on load."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: expected header {CSV_HEADER!r}")
    grid, fuzz, neg = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ValueError(f"{path}: line {lineno}: expected 3 columns")
        try:
            g, f, n = (float(p) for p in parts)
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: non-numeric value") from None
        grid.append(g)
        fuzz.append(f)
        neg.append(n)
    if len(grid) < 2:
        raise ValueError(f"{path}: no curve data")
    grid_arr = np.array(grid)
    fuz = DensityCurve(grid=grid_arr, densities=np.array(fuzz), mode=Mode.FUZZ)
    negc = DensityCurve(grid=grid_arr, densities=np.array(neg), mode=Mode.NEGATE)
    return CscResult(fuzz_curve=fuz, negation_curve=negc,
                     overlap=overlap(fuz, negc),
                     sample_counts={})


# ---------------------------------------------------------------------------
# Overlap matrix
# ---------------------------------------------------------------------------

MISSING_CELL = "—"  # em dash for absent (failed) runs


@dataclass(frozen=True)
class OverlapMatrix:
    """Embedders x datasets grid of overlap scores; absent cells failed."""

    row_names: tuple[str, ...]
    col_names: tuple[str, ...]
    cells: dict

    def get(self, row: str, col: str):
        return self.cells.get((row, col))

    def best_per_column(self) -> dict:
        """Lowest overlap per dataset (lower = better separation)."""
        best = {}
        for col in self.col_names:
            present = [(self.cells[(r, col)], r) for r in self.row_names
                       if (r, col) in self.cells]
            if present:
                best[col] = min(present)[1]
        return best

    def to_csv_text(self) -> str:
        lines = ["embedder," + ",".join(self.col_names)]
        for row in self.row_names:
            cells = []
            for col in self.col_names:
                value = self.get(row, col)
                cells.append("" if value is None else f"{value:.4f}")
            lines.append(row + "," + ",".join(cells))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        """Aligned plain-text table; the best (lowest) cell per dataset is
        flagged with '*'."""
        best = self.best_per_column()
        header = ["embedder"] + list(self.col_names)
        rows = [header]
        for row in self.row_names:
            cells = [row]
            for col in self.col_names:
                value = self.get(row, col)
                if value is None:
                    cells.append(MISSING_CELL)
                else:
                    flag = "*" if best.get(col) == row else ""
                    cells.append(f"{value:.4f}{flag}")
            rows.append(cells)
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        out = []
        for r in rows:
            out.append("  ".join(cell.ljust(widths[i]) if i == 0 else
                                 cell.rjust(widths[i]) for i, cell in enumerate(r)))
        out.append("* lowest overlap per dataset (best concept separation)")
        return "\n".join(out) + "\n"


def overlap_matrix(results: dict) -> OverlapMatrix:
    """Assemble an OverlapMatrix from {(embedder, dataset): CscResult}.

    Row and column order is sorted so the rendering is independent of
    insertion order. Values may also be plain floats.
    """
    if not results:
        raise ValueError("need at least one result")
    rows = tuple(sorted({r for r, _ in results}))
    cols = tuple(sorted({c for _, c in results}))
    cells = {}
    for (row, col), res in results.items():
        cells[(row, col)] = float(res.overlap) if isinstance(res, CscResult) else float(res)
    return OverlapMatrix(row_names=rows, col_names=cols, cells=cells)
