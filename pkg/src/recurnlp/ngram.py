"""n-gram statistics and the n-gram route to recurrence measures.

RR follows from unigram frequencies alone, and DET/ENT from counts of
maximally bounding n-grams: repeated n-grams not swallowed by a longer
repeated n-gram. These functions never build a recurrence plot, so they
serve as an independent cross-check of :mod:`recurnlp.recurrence`.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np

from .corpus import TokenSequence, from_surfaces
from .errors import InsufficientDataError, RangeError, UndefinedInputError
from .recurrence import build_rp, extract_lines, recurrence_rate, rqa_measures

__all__ = [
    "NGramProfile",
    "BoundingCounts",
    "NGramEntropy",
    "PathComparison",
    "build_profile",
    "rr_from_unigrams",
    "max_bounding_counts",
    "det_from_counts",
    "ent_from_counts",
    "chi_square_from_rr",
    "chi_square_uniform",
    "ngram_entropy",
    "compare_paths",
    "write_profile_csv",
]


@dataclass(frozen=True)
class NGramProfile:
    """Frequencies ``f`` of every contiguous k-window, keyed by surface strings."""

    k: int
    freq: dict[tuple[str, ...], int]
    n: int

    @property
    def b(self) -> int:
        """Number of distinct k-grams (vocabulary size ``B`` when k = 1)."""
        return len(self.freq)

    @property
    def total(self) -> int:
        return self.n - self.k + 1

    def pair_count(self) -> int:
        """``sum f (f - 1)``: ordered pairs of distinct positions sharing a k-gram."""
        return sum(f * (f - 1) for f in self.freq.values())


@dataclass(frozen=True)
class BoundingCounts:
    """``DET_k`` per n-gram length k: ordered occurrence pairs of maximally
    bounding k-grams (``f**2 - f`` summed over k-grams)."""

    det_k: dict[int, int] = field(default_factory=dict)

    @property
    def n_l(self) -> int:
        return sum(self.det_k.values())

    @property
    def points_on_lines(self) -> int:
        return sum(k * d for k, d in self.det_k.items())


@dataclass(frozen=True)
class NGramEntropy:
    shannon: float
    printed_form: float
    n_types: int


def _codes(seq) -> np.ndarray:
    if isinstance(seq, TokenSequence):
        return seq.ids
    arr = np.asarray(seq)
    if arr.size == 0 or arr.dtype.kind in "iu":
        return arr.astype(np.int64).ravel()
    return from_surfaces(str(x) for x in seq).ids


def _surface_ids(seq: TokenSequence | Sequence[str] | Sequence[int]):
    if isinstance(seq, TokenSequence):
        return seq.surfaces()
    return list(seq)


def build_profile(seq: TokenSequence | Sequence[str], k: int) -> NGramProfile:
    """Count every k-window of ``seq``.

    >>> build_profile(["a", "b", "a", "b"], 2).freq
    {('a', 'b'): 2, ('b', 'a'): 1}
    """
    words = _surface_ids(seq)
    n = len(words)
    if k < 1:
        raise RangeError(f"k must be >= 1, got {k}")
    if k > n:
        raise InsufficientDataError(f"k={k} exceeds sequence length {n}")
    counts = Counter(tuple(words[p : p + k]) for p in range(n - k + 1))
    return NGramProfile(k, dict(counts), n)


def rr_from_unigrams(profile: NGramProfile) -> float:
    """Recurrence rate from unigram counts: ``N**-2 * sum f (f - 1)``."""
    if profile.k != 1:
        raise ValueError(f"need a unigram profile, got k={profile.k}")
    if profile.n == 0:
        raise UndefinedInputError("recurrence rate is undefined for an empty sequence")
    return profile.pair_count() / (profile.n * profile.n)


# -- maximally bounding n-grams ---------------------------------------------

_MASK = (1 << 64) - 1
_BASES = (0x9E3779B97F4A7C15, 0xC2B2AE3D27D4EB4F)


class _KGramIndex:
    """Polynomial prefix hashes (two bases, arithmetic mod 2**64) so the
    k-windows of any length can be grouped with vectorized numpy calls.
    Hash groups are re-split on the actual tokens, so results are exact."""

    def __init__(self, ids: np.ndarray):
        self.ids = ids
        self.tokens = ids.tolist()
        vals = ids.astype(np.uint64) + np.uint64(1)
        self.prefix = []
        for base in _BASES:
            p = np.zeros(ids.size + 1, dtype=np.uint64)
            acc = 0
            for i, v in enumerate(vals.tolist()):
                acc = (acc * base + v) & _MASK
                p[i + 1] = acc
            self.prefix.append(p)

    def repeated(self, k: int) -> list[list[int]]:
        """Start positions of each k-gram occurring at least twice."""
        n = self.ids.size
        m = n - k + 1
        if m < 2:
            return []
        keys = []
        for base, p in zip(_BASES, self.prefix):
            bk = np.uint64(pow(base, k, 1 << 64))
            keys.append(p[k:] - p[:m] * bk)
        key = np.stack(keys, axis=1)
        _, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.ravel()
        hot = np.flatnonzero(counts[inverse] >= 2)
        if hot.size == 0:
            return []
        groups: dict[int, list[int]] = defaultdict(list)
        for pos in hot.tolist():
            groups[int(inverse[pos])].append(pos)
        out = []
        toks = self.tokens
        for positions in groups.values():
            exact: dict[tuple[int, ...], list[int]] = defaultdict(list)
            for pos in positions:
                exact[tuple(toks[pos : pos + k])].append(pos)
            out.extend(ps for ps in exact.values() if len(ps) >= 2)
        return out

    def longest_repeat(self) -> int:
        """Largest k with a repeated k-gram (0 if no token repeats)."""
        lo, hi = 0, self.ids.size - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.repeated(mid):
                lo = mid
            else:
                hi = mid - 1
        return lo


def max_bounding_counts(seq: TokenSequence | Sequence[int] | np.ndarray) -> BoundingCounts:
    """Count maximally bounding n-grams, longest first.

    For k from ``N - 1`` down to 2, each distinct k-gram's occurrence count
    ``f`` is reduced by the occurrences lying entirely inside an occurrence
    of a longer n-gram already credited as repeating; ``f**2 - f`` of what
    remains is added to ``DET_k``. Occurrences that survive with ``f >= 2``
    are credited and discount the shorter n-grams inside them.

    Lengths above the longest repeated substring contribute nothing, so the
    loop starts there.
    """
    ids = _codes(seq)
    n = int(ids.size)
    if n < 2:
        return BoundingCounts({})
    index = _KGramIndex(ids)
    kmax = min(n - 1, index.longest_repeat())
    # reach[p]: farthest end of any credited span starting at or before p.
    span_end = np.full(n, -1, dtype=np.int64)
    reach = span_end.copy()
    det: dict[int, int] = {}
    for k in range(kmax, 1, -1):
        dk = 0
        credited: list[int] = []
        for positions in index.repeated(k):
            free = [p for p in positions if reach[p] < p + k]
            f = len(free)
            if f >= 2:
                dk += f * f - f
                credited.extend(free)
        if dk:
            det[k] = dk
        if credited:
            c = np.asarray(credited, dtype=np.int64)
            np.maximum.at(span_end, c, c + k)
            reach = np.maximum.accumulate(span_end)
    return BoundingCounts(dict(sorted(det.items())))


def det_from_counts(bc: BoundingCounts, uni: NGramProfile) -> float:
    """``sum k DET_k / sum f (f - 1)``."""
    if uni.k != 1:
        raise ValueError(f"need a unigram profile, got k={uni.k}")
    denom = uni.pair_count()
    if denom == 0:
        raise UndefinedInputError("no recurrent unigram pairs; DET is undefined")
    return bc.points_on_lines / denom


def ent_from_counts(bc: BoundingCounts, log_base: float = math.e) -> float:
    """Shannon entropy of the normalized ``DET_k`` values."""
    n_l = bc.n_l
    if n_l == 0:
        raise UndefinedInputError("no maximally bounding n-grams; ENT is undefined")
    h = 0.0
    for k in sorted(bc.det_k):
        d = bc.det_k[k]
        if d > 0:
            p = d / n_l
            h -= p * math.log(p)
    return h / math.log(log_base) + 0.0


def chi_square_from_rr(rr: float, n: int, b: int) -> float:
    """Uniformity chi-square of unigram counts recovered from RR: ``N B RR + B - N``."""
    if n <= 0 or b <= 0:
        raise RangeError(f"need n > 0 and b > 0, got n={n}, b={b}")
    return n * b * rr + b - n


def chi_square_uniform(profile: NGramProfile) -> float:
    """Observed-count chi-square against equal expected counts ``N / B``."""
    expected = profile.total / profile.b
    return sum((f - expected) ** 2 for f in profile.freq.values()) / expected


def ngram_entropy(profile: NGramProfile) -> NGramEntropy:
    """Entropy of the k-gram distribution in two forms.

    ``shannon`` is ``-sum P ln P`` over relative frequencies. ``printed_form``
    is ``(1 / |types|) * sum P ln P``, the averaged (and unnegated) variant
    that is sometimes quoted for n-gram models; it is reported as is.
    """
    if not profile.freq:
        raise UndefinedInputError("empty profile")
    total = profile.total
    s = 0.0
    for f in sorted(profile.freq.values()):
        p = f / total
        s += p * math.log(p)
    return NGramEntropy(shannon=-s + 0.0, printed_form=s / profile.b, n_types=profile.b)


@dataclass(frozen=True)
class PathComparison:
    """RR, DET and ENT computed along both routes for one sequence."""

    n: int
    rr_rp: float
    rr_ngram: float
    det_rp: float
    det_ngram: float | None
    ent_rp: float
    ent_ngram: float | None
    lines_rp: dict[int, int]
    det_k: dict[int, int]

    @property
    def rr_equal(self) -> bool:
        return self.rr_rp == self.rr_ngram

    @property
    def det_ent_equal(self) -> bool:
        if self.det_ngram is None:
            return self.det_rp == 0.0 and not self.lines_rp
        return self.det_rp == self.det_ngram and self.ent_rp == self.ent_ngram

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "rr_rp": self.rr_rp,
            "rr_ngram": self.rr_ngram,
            "det_rp": self.det_rp,
            "det_ngram": self.det_ngram,
            "ent_rp": self.ent_rp,
            "ent_ngram": self.ent_ngram,
            "lines_rp": {str(k): v for k, v in self.lines_rp.items()},
            "det_k": {str(k): v for k, v in self.det_k.items()},
        }


def compare_paths(seq: TokenSequence) -> PathComparison:
    """Plot route (theiler = 1) against the n-gram route for RR, DET and ENT.

    The n-gram DET/ENT are ``None`` where they are undefined (no recurrent
    pairs, or no bounding n-gram).
    """
    rp = build_rp(seq, theiler=1)
    m = rqa_measures(rp)
    uni = build_profile(seq, 1)
    bc = max_bounding_counts(seq)
    try:
        det_ng = det_from_counts(bc, uni)
    except UndefinedInputError:
        det_ng = None
    try:
        ent_ng = ent_from_counts(bc)
    except UndefinedInputError:
        ent_ng = 0.0 if det_ng is not None else None
    return PathComparison(
        n=len(seq),
        rr_rp=recurrence_rate(rp),
        rr_ngram=rr_from_unigrams(uni),
        det_rp=m.det,
        det_ngram=det_ng,
        ent_rp=m.ent,
        ent_ngram=ent_ng,
        lines_rp=dict(sorted(extract_lines(rp).counts.items())),
        det_k=dict(bc.det_k),
    )


def write_profile_csv(profile: NGramProfile, fh: TextIO | None = None) -> str | None:
    """Dump ``ngram,count`` rows, most frequent first, ties by n-gram text."""
    own = fh is None
    if own:
        fh = io.StringIO()
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["ngram", "count"])
    rows = sorted(((" ".join(g), f) for g, f in profile.freq.items()), key=lambda r: (-r[1], r[0]))
    w.writerows(rows)
    return fh.getvalue() if own else None
