"""Small statistics helpers used by the experiments."""

from __future__ import annotations

from typing import Hashable, Sequence

import numpy as np

from ..errors import InsufficientDataError, UndefinedInputError


def ols_r2(y: Sequence[float], groups: Sequence[Hashable]) -> float:
    """R^2 of a one-way dummy regression (intercept + group indicators).

    The least-squares fit of indicator variables is the group mean, so
    ``R^2 = 1 - SS_within / SS_total``.
    """
    y = np.asarray(y, dtype=float)
    if y.size != len(groups):
        raise ValueError("y and groups differ in length")
    if y.size < 2:
        raise InsufficientDataError("need at least 2 observations")
    labels = np.asarray([str(g) for g in groups])
    uniq, inv = np.unique(labels, return_inverse=True)
    if uniq.size < 2:
        raise InsufficientDataError("need at least 2 groups")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise UndefinedInputError("zero total variance; R^2 is undefined")
    sums = np.bincount(inv, weights=y)
    counts = np.bincount(inv)
    fitted = (sums / counts)[inv]
    ss_res = float(np.sum((y - fitted) ** 2))
    return min(1.0, max(0.0, 1.0 - ss_res / ss_tot))


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise InsufficientDataError("need at least 2 pairs")
    dx = x - x.mean()
    dy = y - y.mean()
    denom = np.sqrt(np.sum(dx * dx) * np.sum(dy * dy))
    if denom == 0:
        raise UndefinedInputError("a variable is constant; correlation is undefined")
    return float(np.clip(np.sum(dx * dy) / denom, -1.0, 1.0))


def standardize_columns(m: np.ndarray) -> np.ndarray:
    """Column z-scores with the sample (n - 1) standard deviation, as R's
    ``scale()``; constant columns become 0."""
    m = np.asarray(m, dtype=float)
    out = np.zeros_like(m)
    if m.shape[0] < 2:
        return out
    sd = m.std(axis=0, ddof=1)
    ok = sd > 0
    out[:, ok] = (m[:, ok] - m[:, ok].mean(axis=0)) / sd[ok]
    return out
