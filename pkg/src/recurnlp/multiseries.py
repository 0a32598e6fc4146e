"""Cross, joint and thresholded (semantic) recurrence plots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .corpus import TokenSequence
from .errors import (
    InsufficientDataError,
    OutOfVocabularyError,
    ParseError,
    RangeError,
    ShapeError,
)
from .recurrence import RecurrencePlot

__all__ = [
    "EmbeddingTable",
    "TrajectoryMatrix",
    "RadiusSearch",
    "build_cross_rp",
    "joint_rp",
    "load_embeddings",
    "build_trajectory",
    "zscore_columns",
    "semantic_rp",
    "thresholded_rr",
    "radius_for_target_rr",
]

RR_TOLERANCE = 0.005
MAX_BISECTIONS = 50


def build_cross_rp(seq_a: TokenSequence, seq_b: TokenSequence) -> RecurrencePlot:
    """Points ``(i, j)`` where word ``i`` of A equals word ``j`` of B.

    Matching is on surface strings, so the two sequences may use unrelated
    id numberings. No Theiler window applies.
    """
    positions_b: dict[str, list[int]] = {}
    for j, t in enumerate(seq_b.tokens):
        positions_b.setdefault(seq_b.vocab[t], []).append(j)
    positions_a: dict[str, list[int]] = {}
    for i, t in enumerate(seq_a.tokens):
        positions_a.setdefault(seq_a.vocab[t], []).append(i)
    rows_parts, cols_parts = [], []
    for word, pa in positions_a.items():
        pb = positions_b.get(word)
        if pb is None:
            continue
        pa_arr = np.asarray(pa, dtype=np.int64)
        pb_arr = np.asarray(pb, dtype=np.int64)
        rows_parts.append(np.repeat(pa_arr, pb_arr.size))
        cols_parts.append(np.tile(pb_arr, pa_arr.size))
    rows = np.concatenate(rows_parts) if rows_parts else np.empty(0, dtype=np.int64)
    cols = np.concatenate(cols_parts) if cols_parts else np.empty(0, dtype=np.int64)
    return RecurrencePlot.from_pairs(len(seq_a), len(seq_b), rows, cols, "cross", 0)


def joint_rp(plots: Sequence[RecurrencePlot]) -> RecurrencePlot:
    """Intersection of the point sets of equally sized plots."""
    if not plots:
        raise ValueError("joint_rp needs at least one plot")
    shape = (plots[0].n_rows, plots[0].n_cols)
    for p in plots[1:]:
        if (p.n_rows, p.n_cols) != shape:
            raise ShapeError(f"plot of shape {(p.n_rows, p.n_cols)} does not match {shape}")
    n_cols = shape[1]

    def keys(p: RecurrencePlot) -> np.ndarray:
        return p.rows * n_cols + p.cols

    common = reduce(lambda a, b: np.intersect1d(a, b, assume_unique=True), (keys(p) for p in plots))
    theiler = max(p.theiler for p in plots)
    return RecurrencePlot.from_pairs(shape[0], n_cols, common // n_cols, common % n_cols, "joint", theiler)


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Read word vectors in the word2vec/GloVe text format.

    One word per line followed by ``D`` numbers. An optional first line
    ``V D`` (two integers) is taken as a header and checked against the
    rows that follow.
    """
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    declared: tuple[int, int] | None = None
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                declared = (int(parts[0]), int(parts[1]))
                dim = declared[1]
                continue
            word, fields = parts[0], parts[1:]
            if dim is None:
                dim = len(fields)
                if dim < 1:
                    raise ParseError(f"word {word!r} has no vector components", line=lineno)
            if len(fields) != dim:
                raise ParseError(f"expected {dim} components, found {len(fields)}", line=lineno)
            try:
                vec = np.array([float(x) for x in fields])
            except ValueError as e:
                raise ParseError(f"non-numeric component ({e})", line=lineno) from None
            vectors[word] = vec
    if dim is None:
        raise ParseError(f"no vectors in {path}")
    if declared is not None and declared[0] != len(vectors):
        raise ParseError(f"header declares {declared[0]} words, file has {len(vectors)}", line=1)
    return EmbeddingTable(dim, vectors)


@dataclass(frozen=True, eq=False)
class TrajectoryMatrix:
    """Rows are word vectors in text order; ``index_map[r]`` is the token
    position row ``r`` came from."""

    rows: np.ndarray
    index_map: np.ndarray
    zscored: bool

    @property
    def t(self) -> int:
        return int(self.rows.shape[0])


def zscore_columns(m: np.ndarray) -> np.ndarray:
    """Standardize columns with the population variance; constant columns become 0."""
    m = np.asarray(m, dtype=float)
    if m.shape[0] == 0:
        return m.copy()
    mu = m.mean(axis=0)
    sd = m.std(axis=0)
    out = np.zeros_like(m)
    ok = sd > 0
    out[:, ok] = (m[:, ok] - mu[ok]) / sd[ok]
    return out


def build_trajectory(seq: TokenSequence, table: EmbeddingTable, oov_policy: str = "skip") -> TrajectoryMatrix:
    """Stack the vector of every word, then z-score each dimension.

    ``oov_policy="skip"`` drops words without a vector (``index_map`` keeps
    track of survivors); ``"error"`` raises on the first one.
    """
    if oov_policy not in ("skip", "error"):
        raise ValueError(f"oov_policy must be 'skip' or 'error', got {oov_policy!r}")
    rows, kept = [], []
    for pos, word in enumerate(seq.surfaces()):
        vec = table.vectors.get(word)
        if vec is None:
            if oov_policy == "error":
                raise OutOfVocabularyError(word, pos)
            continue
        rows.append(vec)
        kept.append(pos)
    m = np.vstack(rows) if rows else np.empty((0, table.dim))
    return TrajectoryMatrix(zscore_columns(m), np.asarray(kept, dtype=np.int64), True)


def semantic_rp(traj: TrajectoryMatrix, radius: float) -> RecurrencePlot:
    """Pairs of distinct rows within Euclidean distance ``radius``."""
    if radius < 0 or math.isnan(radius):
        raise RangeError(f"radius must be >= 0, got {radius}")
    t = traj.t
    if t < 2:
        return RecurrencePlot.empty(t, t, "thresholded", 1)
    pairs = cKDTree(traj.rows).query_pairs(radius, output_type="ndarray")
    i, j = pairs[:, 0], pairs[:, 1]
    rows = np.concatenate([i, j])
    cols = np.concatenate([j, i])
    return RecurrencePlot.from_pairs(t, t, rows, cols, "thresholded", 1)


def thresholded_rr(traj: TrajectoryMatrix, radius: float, tree: cKDTree | None = None) -> float:
    """RR of :func:`semantic_rp` at ``radius`` without building the plot."""
    t = traj.t
    tree = tree if tree is not None else cKDTree(traj.rows)
    # count_neighbors counts ordered pairs including each row with itself
    within = int(tree.count_neighbors(tree, radius))
    return (within - t) / (t * t)


@dataclass(frozen=True)
class RadiusSearch:
    radius: float
    achieved_rr: float
    target_rr: float
    met: bool
    iterations: int


def radius_for_target_rr(
    traj: TrajectoryMatrix,
    target_rr: float,
    tol: float = RR_TOLERANCE,
    max_iter: int = MAX_BISECTIONS,
) -> RadiusSearch:
    """Bisect on the radius until RR is within ``tol`` of ``target_rr``.

    When the target cannot be met (RR jumps over it) the largest radius
    found below the target is returned, or 0 if nothing nonzero sits below
    the target, and ``met`` is False.
    """
    if not 0.0 < target_rr < 1.0:
        raise RangeError(f"target_rr must lie in (0, 1), got {target_rr}")
    if traj.t < 2:
        raise InsufficientDataError(f"need at least 2 trajectory rows, have {traj.t}")
    tree = cKDTree(traj.rows)
    rr0 = thresholded_rr(traj, 0.0, tree)
    if rr0 >= target_rr - tol:
        return RadiusSearch(0.0, rr0, target_rr, abs(rr0 - target_rr) <= tol, 0)
    span = traj.rows.max(axis=0) - traj.rows.min(axis=0)
    hi = float(np.linalg.norm(span))
    rr_hi = thresholded_rr(traj, hi, tree)
    if rr_hi <= target_rr + tol:
        # target at or above the all-pairs RR: shrink to the max pairwise distance
        lo = 0.0
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            if thresholded_rr(traj, mid, tree) >= rr_hi:
                hi = mid
            else:
                lo = mid
        return RadiusSearch(hi, rr_hi, target_rr, abs(rr_hi - target_rr) <= tol, max_iter)
    lo, rr_lo = 0.0, rr0
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        rr = thresholded_rr(traj, mid, tree)
        if abs(rr - target_rr) <= tol:
            return RadiusSearch(mid, rr, target_rr, True, it)
        if rr < target_rr:
            lo, rr_lo = mid, rr
        else:
            hi = mid
    if rr_lo == rr0:
        lo = 0.0
    return RadiusSearch(lo, rr_lo, target_rr, False, max_iter)
