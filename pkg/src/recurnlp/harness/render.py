"""Write recurrence plots as PBM bitmaps, SVG or coordinate CSV.

Axes follow the usual plot convention: ``i`` runs left to right, ``j``
bottom to top, so the line of identity goes from the bottom-left corner
to the top-right one.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..recurrence import RecurrencePlot

FORMATS = ("pbm", "svg", "csv")
_PBM_LINE = 70


def _columns_by_image_row(rp: RecurrencePlot) -> list[np.ndarray]:
    """For each image row (top to bottom, i.e. j descending) the sorted i's."""
    order = np.lexsort((rp.rows, -rp.cols))
    cols = rp.cols[order]
    rows = rp.rows[order]
    out: list[np.ndarray] = []
    cuts = np.searchsorted(-cols, -np.arange(rp.n_cols - 1, -1, -1), side="left")
    cuts = np.append(cuts, cols.size)
    for k in range(rp.n_cols):
        out.append(rows[cuts[k] : cuts[k + 1]])
    return out


def write_pbm(rp: RecurrencePlot, path: str | Path) -> None:
    """Plain (P1) bitmap, ``n_rows`` wide and ``n_cols`` high, 1 = recurrent."""
    width, height = rp.n_rows, rp.n_cols
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"P1\n{width} {height}\n")
        line = np.zeros(width, dtype=np.uint8)
        for xs in _columns_by_image_row(rp):
            line[:] = 0
            line[xs] = 1
            bits = "".join("1" if v else "0" for v in line.tolist())
            for k in range(0, max(len(bits), 1), _PBM_LINE):
                fh.write(bits[k : k + _PBM_LINE] + "\n")


def write_svg(rp: RecurrencePlot, path: str | Path, cell: int = 1) -> None:
    width, height = rp.n_rows * cell, rp.n_cols * cell
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" shape-rendering="crispEdges">\n'
        )
        fh.write(f'<rect width="{width}" height="{height}" fill="white"/>\n')
        order = np.lexsort((rp.cols, rp.rows))
        for i, j in zip(rp.rows[order].tolist(), rp.cols[order].tolist()):
            y = (rp.n_cols - 1 - j) * cell
            fh.write(f'<rect x="{i * cell}" y="{y}" width="{cell}" height="{cell}"/>\n')
        fh.write("</svg>\n")


def write_csv(rp: RecurrencePlot, path: str | Path) -> None:
    order = np.lexsort((rp.cols, rp.rows))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j"])
        w.writerows(zip(rp.rows[order].tolist(), rp.cols[order].tolist()))


def render_rp(rp: RecurrencePlot, path: str | Path, format: str = "pbm") -> Path:
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")
    {"pbm": write_pbm, "svg": write_svg, "csv": write_csv}[format](rp, path)
    return Path(path)
