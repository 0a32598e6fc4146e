"""Independent brute-force references used only by the tests.

Everything here works on a dense ``N x N`` boolean matrix and walks each
diagonal with the gap-differencing recipe, padding every diagonal on both
sides. No code is shared with the library.
"""

from __future__ import annotations

import math

import numpy as np


def dense_rp(ids, theiler: int = 1) -> np.ndarray:
    x = np.asarray(ids)
    m = x[:, None] == x[None, :]
    n = x.size
    i, j = np.indices((n, n))
    m[np.abs(i - j) < theiler] = False
    return m


def dense_cross(a_words, b_words) -> np.ndarray:
    a = np.asarray(a_words, dtype=object)
    b = np.asarray(b_words, dtype=object)
    return np.array([[x == y for y in b] for x in a], dtype=bool).reshape(len(a), len(b))


def gap_lines(diagonal) -> list[int]:
    """Lines on one diagonal: pad with 0 on both ends, difference the 0 positions."""
    cells = [0] + [int(bool(v)) for v in diagonal] + [0]
    zeros = [k for k, v in enumerate(cells) if v == 0]
    return [d - 1 for d in (b - a for a, b in zip(zeros, zeros[1:])) if d > 2]


def dense_lines(m: np.ndarray) -> dict[int, int]:
    counts: dict[int, int] = {}
    r, c = m.shape
    for k in range(-(r - 1), c):
        for length in gap_lines(np.diagonal(m, k)):
            counts[length] = counts.get(length, 0) + 1
    return counts


def dense_trend(m: np.ndarray, exclude_tail: float = 0.1) -> float:
    n = m.shape[0]
    mt = int(math.floor((n - 1) * (1 - exclude_tail)))
    rr = [100.0 * np.diagonal(m, i).sum() / (n - i) for i in range(1, mt + 1)]
    mean = math.fsum(rr) / len(rr)
    num = math.fsum((i - mt / 2) * (v - mean) for i, v in zip(range(1, mt + 1), rr))
    den = math.fsum((i - mt / 2) ** 2 for i in range(1, mt + 1))
    return num / den


def dense_measures(m: np.ndarray, exclude_tail: float = 0.1) -> dict:
    r, c = m.shape
    pts = int(m.sum())
    lines = dense_lines(m)
    n_lines = sum(lines.values())
    on = sum(k * v for k, v in lines.items())
    out = {
        "n_points": pts,
        "rr": pts / (r * c),
        "det": on / pts if pts else 0.0,
        "maxline": max(lines) if lines else 0,
        "meanline": on / n_lines if n_lines else 0.0,
        "n_lines": n_lines,
        "lines": lines,
    }
    if n_lines:
        ent = 0.0
        for k in sorted(lines):
            p = lines[k] / n_lines
            ent -= p * math.log(p)
        out["ent"] = ent + 0.0
    else:
        out["ent"] = 0.0
    out["trend"] = dense_trend(m, exclude_tail) if r == c and math.floor((r - 1) * (1 - exclude_tail)) >= 2 else math.nan
    return out


def maximal_pair_counts(words) -> dict[int, int]:
    """Ordered occurrence pairs (p, q), p != q, of equal k-grams that cannot
    be extended left or right: the n-gram reading of diagonal lines."""
    n = len(words)
    out: dict[int, int] = {}
    for p in range(n):
        for q in range(n):
            if p == q or words[p] != words[q]:
                continue
            if p > 0 and q > 0 and words[p - 1] == words[q - 1]:
                continue
            k = 0
            while p + k < n and q + k < n and words[p + k] == words[q + k]:
                k += 1
            if k >= 2:
                out[k] = out.get(k, 0) + 1
    return out


def naive_bounding_counts(words) -> dict[int, int]:
    """Longest-first discounted k-gram pair counts by direct scanning."""
    n = len(words)
    spans: list[tuple[int, int]] = []
    out: dict[int, int] = {}
    for k in range(n - 1, 1, -1):
        occ: dict[tuple, list[int]] = {}
        for p in range(n - k + 1):
            occ.setdefault(tuple(words[p : p + k]), []).append(p)
        new = []
        for ps in occ.values():
            free = [p for p in ps if not any(a <= p and p + k <= b for a, b in spans)]
            if len(free) >= 2:
                out[k] = out.get(k, 0) + len(free) ** 2 - len(free)
                new.extend((p, p + k) for p in free)
        spans.extend(new)
    return out
