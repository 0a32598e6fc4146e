"""Recurrence plots over categorical sequences and their quantification.

A plot is kept sparse: two parallel index arrays sorted by diagonal
(lag ``j - i``) and then by row, so every diagonal is a contiguous block
and diagonal lines fall out of a single pass of ``np.diff``. Nothing here
allocates an ``N x N`` grid.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import TokenSequence
from .errors import InsufficientDataError, RangeError, UndefinedInputError

__all__ = [
    "KINDS",
    "RecurrencePlot",
    "LineDistribution",
    "RqaMeasures",
    "WindowSpec",
    "ZeroIndexRuns",
    "as_ids",
    "build_rp",
    "recurrence_rate",
    "line_segments",
    "extract_lines",
    "zero_index_runs",
    "rqa_measures",
    "diagonal_recurrence",
    "trend",
    "windowed_rqa",
    "window_starts",
]

KINDS = ("auto", "cross", "joint", "thresholded")

DEFAULT_THEILER = 1
DEFAULT_EXCLUDE_TAIL = 0.1


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _point_keys(rows: np.ndarray, cols: np.ndarray, n_rows: int) -> np.ndarray:
    """One int64 per point whose numeric order is (lag, row) order."""
    return (cols - rows + (n_rows - 1)) * n_rows + rows


@dataclass(frozen=True, eq=False)
class RecurrencePlot:
    """Sparse set of recurrent index pairs ``(i, j)``.

    Use :meth:`from_pairs` to build one; it deduplicates and orders the
    points. ``rows`` and ``cols`` are read-only and sorted by lag
    ``cols - rows``, ties by row.
    """

    n_rows: int
    n_cols: int
    rows: np.ndarray
    cols: np.ndarray
    kind: str = "auto"
    theiler: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if self.theiler < 0:
            raise RangeError(f"theiler must be >= 0, got {self.theiler}")
        if self.rows.shape != self.cols.shape:
            raise ValueError("rows and cols must have equal length")
        if self.rows.size:
            if self.rows.min() < 0 or self.rows.max() >= self.n_rows:
                raise RangeError("row index outside plot")
            if self.cols.min() < 0 or self.cols.max() >= self.n_cols:
                raise RangeError("column index outside plot")

    @classmethod
    def from_pairs(
        cls,
        n_rows: int,
        n_cols: int,
        rows: Iterable[int] | np.ndarray,
        cols: Iterable[int] | np.ndarray,
        kind: str = "auto",
        theiler: int = 0,
    ) -> "RecurrencePlot":
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if rows.size != cols.size:
            raise ValueError("rows and cols must have equal length")
        if rows.size and (rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols):
            raise RangeError(f"point outside a {n_rows} x {n_cols} plot")
        return cls._from_keys(n_rows, n_cols, _point_keys(rows, cols, n_rows), kind, theiler)

    @classmethod
    def _from_keys(cls, n_rows, n_cols, keys: np.ndarray, kind, theiler, unique: bool = False):
        # keys are consumed: sorted in place, then decoded into rows and cols
        keys.sort()
        if not unique and keys.size > 1:
            keys = keys[np.concatenate(([True], keys[1:] != keys[:-1]))]
        rows = keys % max(n_rows, 1)
        cols = keys // max(n_rows, 1)
        del keys
        cols -= n_rows - 1
        cols += rows
        return cls(n_rows, n_cols, _readonly(rows), _readonly(cols), kind, theiler)

    @classmethod
    def empty(cls, n_rows: int, n_cols: int | None = None, kind: str = "auto", theiler: int = 0):
        n_cols = n_rows if n_cols is None else n_cols
        return cls.from_pairs(n_rows, n_cols, [], [], kind, theiler)

    @property
    def n_points(self) -> int:
        return int(self.rows.size)

    @property
    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    @property
    def lags(self) -> np.ndarray:
        return self.cols - self.rows

    @property
    def points(self) -> frozenset[tuple[int, int]]:
        return frozenset(zip(self.rows.tolist(), self.cols.tolist()))

    def same_points(self, other: "RecurrencePlot") -> bool:
        """Equal dimensions and identical point sets (kind and theiler ignored)."""
        return (
            self.n_rows == other.n_rows
            and self.n_cols == other.n_cols
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
        )

    def __eq__(self, other):
        if not isinstance(other, RecurrencePlot):
            return NotImplemented
        return self.same_points(other) and self.kind == other.kind and self.theiler == other.theiler

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"RecurrencePlot({self.n_rows}x{self.n_cols}, kind={self.kind!r}, "
            f"theiler={self.theiler}, n_points={self.n_points})"
        )


@dataclass(frozen=True)
class LineDistribution:
    """Histogram of diagonal line lengths (only lengths >= 2)."""

    counts: dict[int, int] = field(default_factory=dict)

    @property
    def n_lines(self) -> int:
        return sum(self.counts.values())

    @property
    def total_points_on_lines(self) -> int:
        return sum(length * c for length, c in self.counts.items())

    @property
    def lengths(self) -> list[int]:
        """Every line length, ascending, with multiplicity."""
        out: list[int] = []
        for length in sorted(self.counts):
            out.extend([length] * self.counts[length])
        return out


@dataclass(frozen=True)
class RqaMeasures:
    """Whole-plot RQA summary. ``rr`` and ``det`` are fractions, ``ent`` in
    units of ``log_base`` (nats by default), ``trend`` in percentage points
    per diagonal (NaN when it cannot be computed)."""

    rr: float
    det: float
    ent: float
    maxline: int
    meanline: float
    n_lines: int
    trend: float
    n: int
    n_points: int = 0

    def as_dict(self, percent: bool = False) -> dict:
        scale = 100.0 if percent else 1.0
        trend = None if math.isnan(self.trend) else self.trend
        return {
            "n": self.n,
            "n_points": self.n_points,
            "rr": self.rr * scale,
            "det": self.det * scale,
            "ent": self.ent,
            "maxline": self.maxline,
            "meanline": self.meanline,
            "n_lines": self.n_lines,
            "trend": trend,
        }


@dataclass(frozen=True)
class WindowSpec:
    winsz: int
    wshft: int

    def __post_init__(self):
        if self.winsz < 2:
            raise RangeError(f"winsz must be >= 2, got {self.winsz}")
        if self.wshft < 1:
            raise RangeError(f"wshft must be >= 1, got {self.wshft}")


def as_ids(seq: TokenSequence | Sequence[int] | np.ndarray) -> np.ndarray:
    if isinstance(seq, TokenSequence):
        return seq.ids
    return np.asarray(seq, dtype=np.int64).ravel()


def build_rp(seq: TokenSequence | Sequence[int] | np.ndarray, theiler: int = DEFAULT_THEILER) -> RecurrencePlot:
    """Auto-recurrence plot ``{(i, j) : x_i == x_j, |i - j| >= theiler}``.

    Points are generated per token type from its posting list, so the cost
    is proportional to the number of recurrences rather than ``N**2``.
    """
    if theiler < 0:
        raise RangeError(f"theiler must be >= 0, got {theiler}")
    ids = as_ids(seq)
    n = int(ids.size)
    if n == 0:
        return RecurrencePlot.empty(0, 0, "auto", theiler)
    order = np.argsort(ids, kind="stable")
    cuts = np.flatnonzero(np.diff(ids[order])) + 1
    parts = []
    for pos in np.split(order, cuts):
        if pos.size < 2 and theiler > 0:
            continue
        r = np.repeat(pos, pos.size)
        c = np.tile(pos, pos.size)
        if theiler > 0:
            keep = np.abs(r - c) >= theiler
            r, c = r[keep], c[keep]
        parts.append(_point_keys(r, c, n))
    keys = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    del parts
    return RecurrencePlot._from_keys(n, n, keys, "auto", theiler, unique=True)


def recurrence_rate(rp: RecurrencePlot) -> float:
    """``|points| / (n_rows * n_cols)``; the diagonal is excluded only via theiler."""
    size = rp.n_rows * rp.n_cols
    if size == 0:
        raise UndefinedInputError("recurrence rate is undefined for an empty sequence")
    return rp.n_points / size


def line_segments(rp: RecurrencePlot, min_length: int = 2) -> list[tuple[int, int, int]]:
    """Maximal diagonal runs as ``(lag, start_row, length)`` triples."""
    lag, start, length = _runs(rp)
    keep = length >= min_length
    return list(zip(lag[keep].tolist(), start[keep].tolist(), length[keep].tolist()))


def _run_starts(rp: RecurrencePlot) -> tuple[np.ndarray, np.ndarray]:
    # Points are sorted by (lag, row): a run continues while the lag is
    # unchanged and the row advances by exactly one.
    n = rp.n_points
    if n == 0:
        e = np.empty(0, dtype=np.int64)
        return e, e
    rows = rp.rows
    new_run = np.empty(n, dtype=bool)
    new_run[0] = True
    np.not_equal(np.diff(rows), 1, out=new_run[1:])
    lag = rp.lags
    new_run[1:] |= lag[1:] != lag[:-1]
    del lag
    starts = np.flatnonzero(new_run)
    del new_run
    return starts, np.diff(starts, append=n)


def _runs(rp: RecurrencePlot) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    starts, lengths = _run_starts(rp)
    return rp.cols[starts] - rp.rows[starts], rp.rows[starts], lengths


def extract_lines(rp: RecurrencePlot) -> LineDistribution:
    """Histogram of maximal diagonal runs of length >= 2 over all lags.

    Runs touching the plot edge count in full. The result is identical to
    applying :func:`zero_index_runs` to every diagonal.
    """
    _, lengths = _run_starts(rp)
    lengths = lengths[lengths >= 2]
    if lengths.size == 0:
        return LineDistribution({})
    values, counts = np.unique(lengths, return_counts=True)
    return LineDistribution(dict(zip(values.tolist(), counts.tolist())))


@dataclass(frozen=True)
class ZeroIndexRuns:
    zero_indices: list[int]
    deltas: list[int]
    lines: list[int]


def zero_index_runs(cells: Sequence[int] | np.ndarray) -> ZeroIndexRuns:
    """Line lengths on one diagonal by differencing the positions of its gaps.

    ``cells`` is the diagonal as 0/1 values. Positions of absent cells are
    1-based; a virtual absent cell is added at position 0 or ``L + 1`` only
    when the diagonal starts or ends with a present cell, so runs touching
    the border still get delimited. A gap difference ``d > 2`` marks a line
    of length ``d - 1``.

    >>> zero_index_runs([0,1,1,1,1,1,1,0,0,1,1,1,0,0]).lines
    [6, 3]
    """
    cells = np.asarray(cells).astype(bool)
    L = cells.size
    if L == 0:
        return ZeroIndexRuns([], [], [])
    zeros = (np.flatnonzero(~cells) + 1).tolist()
    if cells[0]:
        zeros.insert(0, 0)
    if cells[-1]:
        zeros.append(L + 1)
    deltas = np.diff(zeros).tolist()
    lines = [d - 1 for d in deltas if d > 2]
    return ZeroIndexRuns(zeros, deltas, lines)


def diagonal_recurrence(rp: RecurrencePlot) -> np.ndarray:
    """Percent recurrence on each upper diagonal; index ``i`` is lag ``i``.

    Entry 0 is the line of identity. Only valid for square plots.
    """
    n = rp.n_rows
    shifted = rp.lags
    shifted += n - 1
    counts = np.bincount(shifted, minlength=2 * n - 1)[n - 1 :]
    return 100.0 * counts / (n - np.arange(n))


def trend(rp: RecurrencePlot, exclude_tail: float = DEFAULT_EXCLUDE_TAIL) -> float:
    """Slope of per-diagonal percent recurrence against distance from the LOI.

    Uses diagonals ``1..M`` with ``M = floor((N - 1) * (1 - exclude_tail))``
    and the regression quotient

        sum (i - M/2) (RR_i - mean RR) / sum (i - M/2)**2

    Negative values mean recurrence thins out away from the main diagonal.
    """
    if not rp.is_square:
        raise ValueError("TREND needs a square plot")
    if not 0.0 <= exclude_tail < 1.0:
        raise RangeError(f"exclude_tail must lie in [0, 1), got {exclude_tail}")
    n = rp.n_rows
    m = int(math.floor((n - 1) * (1.0 - exclude_tail)))
    if m < 2:
        raise InsufficientDataError(f"TREND needs at least 2 diagonals, have {max(m, 0)} (N={n})")
    rr_i = diagonal_recurrence(rp)[1 : m + 1]
    i = np.arange(1, m + 1, dtype=float)
    x = i - m / 2.0
    # correctly rounded sums keep the result independent of summation order
    mean = math.fsum(rr_i.tolist()) / m
    return math.fsum((x * (rr_i - mean)).tolist()) / math.fsum((x * x).tolist())


def rqa_measures(
    rp: RecurrencePlot,
    exclude_tail: float = DEFAULT_EXCLUDE_TAIL,
    log_base: float = math.e,
) -> RqaMeasures:
    """Compute RR, DET, ENT, MAXLINE, MEANLINE and TREND for one plot.

    Parameters
    ----------
    rp : RecurrencePlot
        Any plot kind. Non-square plots use ``n_rows * n_cols`` as the
        recurrence-rate denominator.
    exclude_tail : float
        Fraction of the farthest diagonals left out of TREND.
    log_base : float
        Base of the logarithm in ENT; natural log by default.

    Returns
    -------
    RqaMeasures
        DET, MAXLINE and MEANLINE are 0 when there are no lines. TREND is
        NaN for cross/joint plots and for plots too small to regress.
    """
    rr = recurrence_rate(rp)
    lines = extract_lines(rp)
    n_lines = lines.n_lines
    on_lines = lines.total_points_on_lines
    det = on_lines / rp.n_points if rp.n_points else 0.0
    if n_lines:
        lengths = sorted(lines.counts)
        probs = [lines.counts[k] / n_lines for k in lengths]
        ent = -sum(p * math.log(p) for p in probs) / math.log(log_base) + 0.0
        maxline = lengths[-1]
        meanline = on_lines / n_lines
    else:
        ent, maxline, meanline = 0.0, 0, 0.0
    tr = math.nan
    if rp.is_square and rp.kind in ("auto", "thresholded"):
        try:
            tr = trend(rp, exclude_tail)
        except InsufficientDataError:
            pass
    return RqaMeasures(
        rr=rr,
        det=det,
        ent=ent,
        maxline=maxline,
        meanline=meanline,
        n_lines=n_lines,
        trend=tr,
        n=rp.n_rows,
        n_points=rp.n_points,
    )


def window_starts(n: int, w: WindowSpec) -> range:
    if w.winsz > n:
        raise InsufficientDataError(f"window of {w.winsz} tokens exceeds sequence length {n}")
    return range(0, n - w.winsz + 1, w.wshft)


def windowed_rqa(
    seq: TokenSequence | Sequence[int] | np.ndarray,
    w: WindowSpec,
    theiler: int = DEFAULT_THEILER,
    jobs: int = 1,
    **measure_kw,
) -> list[tuple[int, RqaMeasures]]:
    """RQA on every full window ``[s, s + winsz)`` for ``s = 0, wshft, ...``."""
    ids = as_ids(seq)
    starts = window_starts(int(ids.size), w)

    def one(s: int) -> tuple[int, RqaMeasures]:
        return s, rqa_measures(build_rp(ids[s : s + w.winsz], theiler), **measure_kw)

    if jobs > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(one, starts))
    return [one(s) for s in starts]
